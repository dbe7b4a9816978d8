"""
Action, Jacobi-Maupertuis length and a discrete minimality test
===============================================================
"""
import numpy as np

from parabolic3b import euler, lagrange
from parabolic3b.core import MassTriple
from parabolic3b.jmaction import (action, homothetic_path, jm_length, local_minimizer_probe,
                                  zero_energy_timing)
from parabolic3b.secondvar import negative_direction

m = MassTriple(1, 1, 1)
rng = np.random.default_rng(0)

# any timing of a path costs at least its JM length; zero energy timing attains it
path = homothetic_path(lagrange(m), 1.0, 8.0, 40)
wobbly = path.retimed(np.cumsum(rng.uniform(0.2, 2.0, len(path))))
print("JM length", jm_length(path))
print("action, random timing", action(wobbly))
print("action, zero energy timing", action(zero_energy_timing(path), points=32))

# Lagrange ray: nothing negative.  Euler ray over two conjugate intervals: a negative direction.
print("Lagrange [1,4] min eigenvalue", local_minimizer_probe(homothetic_path(lagrange(m), 1.0, 4.0)).min_eigenvalue)
t1, t3 = negative_direction(euler(m, 2), N=256).window
res = local_minimizer_probe(homothetic_path(euler(m, 2), t1, t3, 128))
print(f"Euler [{t1:.0f}, {t3:.3g}] min eigenvalue", res.min_eigenvalue)
