"""
Central configurations of three bodies
======================================

Five of them for any positive masses: two equilateral triangles and three
collinear ones, one for each choice of the middle body.
"""
import numpy as np

from parabolic3b import all_central_configurations, core
from parabolic3b.core import MassTriple

m = MassTriple(1.0, 2.0, 3.0)
for c in all_central_configurations(m):
    # the gradient of U along the sphere I = 1 vanishes at a central configuration
    res = core.mass_norm(core.sphere_gradient(c.s.s, m), m)
    print(f"{c.kind.value:10s} U = {c.U_value:8.4f}  residual {res:.1e}")

# the collinear shapes come from a quintic in the ratio of the two gaps
e = all_central_configurations(m)[2]
print("euler root", e.euler_root, "positions x:", np.round(e.c[0::2], 4))
