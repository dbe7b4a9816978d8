import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parabolic3b import core
from parabolic3b.centralconfig import all_central_configurations
from parabolic3b.core import MassTriple
from parabolic3b.errors import CollisionError, InvalidMassError, NotCenteredError, ZeroConfigurationError

SQ3 = np.sqrt(3.0)
EQUILATERAL = np.array([1.0, 0.0, -0.5, SQ3 / 2, -0.5, -SQ3 / 2])


def random_centered(rng, masses, n=None):
    q = rng.standard_normal((n, 6) if n else 6)
    return core.center(q, masses)


def test_mass_triple_validation():
    m = MassTriple(1, 2, 3)
    assert m.m == 6
    for bad in [(0, 1, 1), (-1, 1, 1), (np.inf, 1, 1), (np.nan, 1, 1)]:
        with pytest.raises(InvalidMassError):
            MassTriple(*bad)
    with pytest.raises(InvalidMassError):
        MassTriple.from_sequence([1, 2])


def test_potential_examples(equal):
    assert core.potential([0, 0, 1, 0, 2, 0], equal) == pytest.approx(2.5, rel=1e-15)
    assert core.potential(EQUILATERAL, equal) == pytest.approx(SQ3, rel=1e-14)
    with pytest.raises(CollisionError):
        core.potential([0, 0, 0, 0, 1, 0], equal)


def test_moment_of_inertia_examples(equal):
    assert core.moment_of_inertia(EQUILATERAL, equal) == pytest.approx(3.0, rel=1e-14)
    assert core.moment_of_inertia(np.zeros(6), equal) == 0.0
    q = np.array([-1.0, 0, 0, 0, 1, 0])
    assert core.moment_of_inertia(q, equal) == pytest.approx(2.0)
    assert core.moment_of_inertia_pairwise(q, equal) == pytest.approx(2.0)


def test_inertia_formulas_agree(rng):
    for _ in range(20):
        m = MassTriple(*rng.uniform(0.1, 3, 3))
        q = random_centered(rng, m)
        assert core.moment_of_inertia(q, m) == pytest.approx(core.moment_of_inertia_pairwise(q, m), rel=1e-12)


def test_homogeneity_and_euler_identity(rng):
    for _ in range(50):
        m = MassTriple(*rng.uniform(0.1, 3, 3))
        q = rng.standard_normal(6)
        lam = rng.uniform(0.2, 5)
        U = core.potential(q, m)
        assert core.potential(lam * q, m) == pytest.approx(U / lam, rel=1e-10)
        np.testing.assert_allclose(core.grad_potential(lam * q, m), core.grad_potential(q, m) / lam**2,
                                   rtol=1e-10, atol=1e-12 * U)
        np.testing.assert_allclose(core.hessian_potential(lam * q, m), core.hessian_potential(q, m) / lam**3,
                                   rtol=1e-10, atol=1e-12 * U)
        assert core.mass_inner(core.grad_potential(q, m), q, m) == pytest.approx(-U, rel=1e-10)


def test_gradient_finite_differences(rng):
    m = MassTriple(1, 2, 3)
    for _ in range(20):
        q = rng.standard_normal(6)
        h = rng.standard_normal(6)
        eps = 1e-6
        fd = (core.potential(q + eps * h, m) - core.potential(q - eps * h, m)) / (2 * eps)
        assert core.mass_inner(core.grad_potential(q, m), h, m) == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_hessian_finite_differences_and_structure(rng):
    m = MassTriple(1, 2, 3)
    for _ in range(20):
        q = rng.standard_normal(6)
        D = core.hessian_potential(q, m)
        eps = 1e-5
        fd = np.column_stack([(core.grad_potential(q + eps * e, m) - core.grad_potential(q - eps * e, m)) / (2 * eps)
                              for e in np.eye(6)])
        np.testing.assert_allclose(D, fd, rtol=1e-5, atol=1e-5 * np.abs(D).max())
        H = core.hessian_euclidean(q, m)
        assert np.abs(H - H.T).max() <= 1e-12 * np.abs(H).max()
        blocks = H.reshape(3, 2, 3, 2)
        assert np.abs(blocks.sum(axis=2)).max() <= 1e-12 * np.abs(H).max()
    s = random_centered(rng, m)
    np.testing.assert_allclose(core.hessian_potential(2 * s, m), core.hessian_potential(s, m) / 8, rtol=1e-12)


def test_hessian_batches_match_single(rng):
    m = MassTriple(0.3, 1.1, 2.0)
    q = rng.standard_normal((5, 6))
    H = core.hessian_euclidean(q, m)
    for k in range(5):
        np.testing.assert_array_equal(H[k], core.hessian_euclidean(q[k], m))


def test_sphere_gradient(rng):
    m = MassTriple(1, 2, 3)
    for c in all_central_configurations(m):
        assert core.mass_norm(core.sphere_gradient(c.c, m), m) < 1e-10
    for _ in range(10):
        _, s = core.normalize(random_centered(rng, m), m)
        g = core.sphere_gradient(s, m)
        assert abs(core.mass_inner(g, s.s, m)) < 1e-12 * core.potential(s, m)
        gm = core.grad_potential(s, m)
        proj = gm - core.mass_inner(gm, s.s, m) * s.s
        np.testing.assert_allclose(g, proj, atol=1e-12 * np.abs(gm).max())


def test_normalize(equal, rng):
    r, s = core.normalize(EQUILATERAL, equal)
    assert r == pytest.approx(SQ3)
    assert core.moment_of_inertia(s, equal) == pytest.approx(1.0, abs=1e-12)
    r1, s1 = core.normalize(s.s, equal)
    assert r1 == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(s1.s, s.s, atol=1e-15)
    r5, s5 = core.normalize(5 * EQUILATERAL, equal)
    assert r5 == pytest.approx(5 * r)
    np.testing.assert_allclose(s5.s, s.s, atol=1e-15)
    with pytest.raises(ZeroConfigurationError):
        core.normalize(np.zeros(6), equal)
    with pytest.raises(NotCenteredError):
        core.normalize(EQUILATERAL + 1.0, equal)
    assert s.com_residual < 1e-12 and s.sphere_residual < 1e-12


def test_normalized_configuration_is_read_only(equal):
    _, s = core.normalize(EQUILATERAL, equal)
    with pytest.raises(ValueError):
        s.s[0] = 1.0


def test_xy_layout_roundtrip(rng):
    q = rng.standard_normal(6)
    xy = core.to_xy_layout(q)
    np.testing.assert_array_equal(xy[:3], q[0::2])
    np.testing.assert_array_equal(core.from_xy_layout(xy), q)
    np.testing.assert_array_equal(core.xy_permutation_matrix() @ q, xy)


def test_config_json_roundtrip(rng):
    q = rng.standard_normal(6)
    text = core.config_to_json(q)
    assert len(json.loads(text)) == 6
    np.testing.assert_array_equal(core.config_from_json(text), q)


def test_sphere_tangent_basis(rng):
    m = MassTriple(1, 2, 3)
    _, s = core.normalize(random_centered(rng, m), m)
    P = core.sphere_tangent_basis(s.s, m)
    G = P.T @ (m.diag()[:, None] * P)
    np.testing.assert_allclose(G, np.eye(3), atol=1e-12)
    assert np.abs(core.center_of_mass_moment(P.T, m)).max() < 1e-12
    assert np.abs(P.T @ (m.diag() * s.s)).max() < 1e-12
    sp = core.perp(s.s)
    np.testing.assert_allclose(P[:, 0], sp / core.mass_norm(sp, m), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 20), min_size=3, max_size=3), st.floats(0, 2 * np.pi))
def test_rotation_invariance(ms, angle):
    m = MassTriple(*ms)
    q = np.array([0.3, -1.2, 1.7, 0.4, -0.9, 0.8])
    qr = core.rotate(q, angle)
    assert core.potential(qr, m) == pytest.approx(core.potential(q, m), rel=1e-12)
    assert core.moment_of_inertia(qr, m) == pytest.approx(core.moment_of_inertia(q, m), rel=1e-12)
