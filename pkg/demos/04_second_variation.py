"""
Conjugate points along the collinear homothetic orbit
=====================================================

Along the Euler ray, variations in the direction of the negative eigenvalue
alpha1 obey t^2 y'' + (4/3) t y' + (2/9) nu y = 0.  For nu > 1/8 every
solution oscillates in ln t, so conjugate points pile up and the ray stops
minimizing.
"""
import numpy as np

from parabolic3b import euler
from parabolic3b.core import MassTriple
from parabolic3b.secondvar import conjugate_points, indicial, negative_direction, scaling_identity_check
from parabolic3b.spectra import nu_parameter

m = MassTriple(1, 1, 1)
nu = nu_parameter(m, 2)
data = indicial(nu)
print("nu", nu, "oscillation rate", data.oscillation_rate)
pts = conjugate_points(nu, 1.0, 1e8)
print("conjugate points from t = 1:", np.round(pts, 2))
print("successive ratios", np.round(np.array(pts[1:]) / pts[:-1], 6), "vs", np.exp(np.pi / data.oscillation_rate))

nd = negative_direction(euler(m, 2))
print("window", nd.window)
print(f"Q = {nd.Q:.6f} +- {nd.quadrature_error:.1e} (closed form {nd.closed_form:.6f})")

# Q scales like lambda^(1/3) when the window is stretched
for lam in (2.0, 100.0):
    print("scaling gap at", lam, scaling_identity_check(nd.profile, lam, nd.alpha1, euler(m, 2)))

# a heavy middle body closes the spiral
light = MassTriple(0.05, 0.9, 0.05)
print("heavy middle: nu =", nu_parameter(light, 2), "conjugate points:", conjugate_points(nu_parameter(light, 2), 1.0, 1e6))
