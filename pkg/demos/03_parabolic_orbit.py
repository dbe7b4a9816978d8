"""
A parabolic motion from the stable manifold at infinity
=======================================================

Start a hair away from the Lagrange restpoint at infinity, inside its
stable space, and integrate backward.  Read forward, the orbit escapes with
r(t) ~ t^(2/3) and kinetic energy tending to zero.
"""
import numpy as np

from parabolic3b import lagrange
from parabolic3b.core import MassTriple
from parabolic3b.flow import restpoint, shoot_stable_manifold, stable_subspace
from parabolic3b.flow.manifolds import parabolic_diagnostics

m = MassTriple(1.0, 2.0, 3.0)
rp = restpoint(lagrange(m), "+", at_infinity=True)
ss = stable_subspace(rp)
print("stable exponents", np.round(ss.eigenvalues.real, 4))

# radial direction plus a bit of the shape modes
d = ss.vectors[0] + 0.3 * ss.vectors[1] - 0.2 * ss.vectors[2]
tr = shoot_stable_manifold(rp, 1e-6, d / np.linalg.norm(d), 12 / rp.v0)
print(tr.summary())

dg = parabolic_diagnostics(tr)
print("fitted exponent of r(t):", dg["exponent"])
print("K at the end / K at the start:", dg["K_ratio"])
