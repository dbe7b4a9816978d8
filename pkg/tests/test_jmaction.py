import numpy as np
import pytest

from parabolic3b import core
from parabolic3b.centralconfig import euler, lagrange
from parabolic3b.core import MassTriple
from parabolic3b.errors import CollisionError
from parabolic3b.jmaction import (DiscretePath, action, centered_basis, direction_cosine, energy_residuals,
                                  homothetic_path, jm_length, local_minimizer_probe, zero_energy_timing)
from parabolic3b.secondvar import conjugate_points, negative_direction, rho
from parabolic3b.spectra import nu_parameter


def _smooth_path(rng, m, n=40):
    L = lagrange(m)
    x = np.linspace(0, 1, n)
    q = np.outer(1 + x, L.c)
    for k in (1, 2, 3):
        q += np.outer(np.sin(k * np.pi * x), core.center(rng.standard_normal(6) * 0.1 / k, m))
    return DiscretePath(q, m)


def test_homothetic_action_and_length():
    m = MassTriple(1, 2, 3)
    c = euler(m, 3)
    t0, t1 = 1.0, 8.0
    path = homothetic_path(c, t0, t1, 64)
    C = (4.5 * c.U_value) ** (1 / 3)
    # on the zero-energy homothetic orbit K + U = 2U = 2 U(c) / (C t^{2/3})
    exact_action = 2 * c.U_value / C * 3 * (t1 ** (1 / 3) - t0 ** (1 / 3))
    # and the JM length is int sqrt(2 U(c) / rho) d rho
    r0, r1 = rho(c, t0), rho(c, t1)
    exact_len = np.sqrt(2 * c.U_value) * 2 * (np.sqrt(r1) - np.sqrt(r0))
    assert exact_action == pytest.approx(exact_len, rel=1e-12)
    assert action(path) == pytest.approx(exact_action, rel=1e-6)
    assert jm_length(path) == pytest.approx(exact_len, rel=1e-10)


def test_jm_length_is_parametrization_free(rng):
    m = MassTriple(1, 1, 2)
    p = _smooth_path(rng, m)
    t1 = np.cumsum(rng.uniform(0.5, 1.5, len(p)))
    assert jm_length(p.retimed(t1)) == jm_length(p)
    assert jm_length(p.rotated(0.7)) == pytest.approx(jm_length(p), rel=1e-12)
    assert action(p.retimed(t1).rotated(0.3)) == pytest.approx(action(p.retimed(t1)), rel=1e-12)


def test_length_bounds_action(rng):
    for _ in range(10):
        m = MassTriple(*rng.uniform(0.5, 2, 3))
        p = _smooth_path(rng, m)
        tp = p.retimed(np.cumsum(rng.uniform(0.1, 3, len(p))))
        assert jm_length(tp) <= action(tp)


def test_zero_energy_timing_equalizes(rng):
    m = MassTriple(1, 2, 3)
    p = _smooth_path(rng, m)
    z = zero_energy_timing(p, t0=2.0)
    assert z.times[0] == 2.0
    assert action(z, points=32) == pytest.approx(jm_length(p), rel=1e-8)
    U = core.potential(z.nodes, m)
    assert np.max(np.abs(energy_residuals(z)[1:-1] / U[1:-1])) < 1e-6


def test_validation_and_json(rng):
    m = MassTriple(1, 1, 1)
    p = _smooth_path(rng, m).retimed(np.arange(40.0))
    assert DiscretePath.from_json(p.to_json()).to_dict() == p.to_dict()
    with pytest.raises(ValueError):
        DiscretePath(p.nodes[:1], m)
    with pytest.raises(ValueError):
        DiscretePath(np.vstack([p.nodes[:1], p.nodes[:1]]), m)
    with pytest.raises(ValueError):
        p.retimed(np.arange(40.0)[::-1])
    with pytest.raises(ValueError):
        _smooth_path(rng, m).spline()
    coll = p.nodes.copy()
    coll[5, 2:4] = coll[5, 0:2]
    with pytest.raises(CollisionError):
        DiscretePath(coll, m)


def test_centered_basis():
    m = MassTriple(1, 2, 3)
    E = centered_basis(m)
    G = (E * m.diag()) @ E.T
    np.testing.assert_allclose(G, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(core.center_of_mass_moment(E, m), 0.0, atol=1e-12)


def test_probe_lagrange_nonnegative():
    m = MassTriple(1, 1, 1)
    res = local_minimizer_probe(homothetic_path(lagrange(m), 1.0, 4.0, 64))
    assert res.min_eigenvalue > 0
    assert np.all(np.diff(res.eigenvalues) >= 0)


def test_probe_euler_finds_second_variation_direction():
    m = MassTriple(1, 1, 1)
    c = euler(m, 2)
    nd = negative_direction(c, N=1024)
    t1, t3 = nd.window
    path = homothetic_path(c, t1, t3, 128)
    res = local_minimizer_probe(path)
    assert res.min_eigenvalue < 0
    # the worst direction lines up with rho phi z from the continuous problem
    ref = (rho(c, path.times) * nd.profile(path.times))[:, None] * nd.profile.z_direction
    assert abs(direction_cosine(path, res.worst_direction, ref)) > 0.99
    # inside a single conjugate interval there is nothing negative
    nu = nu_parameter(m, 2)
    inner = homothetic_path(c, 1.5, 0.95 * conjugate_points(nu, 1.5, 1e4)[0], 64)
    assert local_minimizer_probe(inner).min_eigenvalue > 0
