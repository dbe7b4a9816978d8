"""
Exponents at the restpoints and the spiraling region
====================================================
"""
import numpy as np

from parabolic3b import euler, lagrange, restpoint_eigenvalues
from parabolic3b.core import MassTriple
from parabolic3b.spectra import numeric_crosscheck, spiraling_region_scan

m = MassTriple(1, 1, 1)
for cc in (lagrange(m), euler(m, 2)):
    rep = restpoint_eigenvalues(cc, "+", True, m)
    print(cc.kind.value, "v =", round(rep.v0, 4))
    print("   exponents", np.round(rep.eigenvalues, 4))
    print("   closed form vs dense eigensolve:", f"{numeric_crosscheck(cc, '+', True, m):.1e}")

# Euler exponents turn complex once nu passes 1/8; equal masses sit well inside (nu = 1.4)
rep = restpoint_eigenvalues(euler(m, 2), "+", True, m)
print("nu =", rep.nu, "spiraling:", rep.spiraling)

cells = spiraling_region_scan(60)
inside = sum(bool(c.in_spiraling_range) for c in cells)
print(f"{inside} of {len(cells)} grid cells have all three Euler points spiraling")
