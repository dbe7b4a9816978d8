import json

import numpy as np
import pytest

from parabolic3b import core
from parabolic3b.centralconfig import all_central_configurations, euler, lagrange
from parabolic3b.core import MassTriple
from parabolic3b.errors import BoundaryError
from parabolic3b.spectra import (appendix_matrices, build_variational_matrices, constrained_B, is_spiraling,
                                 lagrange_gamma_product, lagrange_k, lambda_pair, mass_map_csv, match_multisets,
                                 nontrivial_alphas, nu_from_matrix, nu_parameter, nu_parameter_batch,
                                 numeric_crosscheck, restpoint_eigenvalues, simplex_grid, spiraling_region_scan)

from conftest import random_masses


def test_lagrange_k():
    assert lagrange_k(MassTriple(1, 1, 1)) == 0.0
    # direct evaluation: 2 (0.999)^2 / (2 (2.001)^2); tends to 1/4 as the third mass vanishes
    assert lagrange_k(MassTriple(1, 1, 0.001)) == pytest.approx(0.998001 / 4.004001, rel=1e-14)
    assert lagrange_k(MassTriple(1, 1, 1e-9)) == pytest.approx(0.25, abs=1e-8)
    assert lagrange_k(MassTriple(1, 2, 3)) == pytest.approx(lagrange_k(MassTriple(3, 1, 2)), rel=1e-15)


def test_nu_equal_masses_and_oracle(rng):
    for middle in (1, 2, 3):
        assert nu_parameter(MassTriple(1, 1, 1), middle) == pytest.approx(1.4, abs=1e-12)
    for m in random_masses(rng, 20, 1.0):
        for middle in (1, 2, 3):
            nu = nu_parameter(m, middle)
            assert nu == pytest.approx(nu_from_matrix(euler(m, middle), m), rel=1e-10)
            assert nu == pytest.approx(nu_parameter(m.scaled(3.7), middle), rel=1e-12)
    assert nu_parameter(MassTriple(0.05, 0.9, 0.05), 2) < 0.125


def test_nu_batch_matches_scalar(rng):
    a = rng.dirichlet([1, 1, 1], 30)
    for middle in (1, 2, 3):
        batch = nu_parameter_batch(a, middle)
        scalar = [nu_parameter(MassTriple(*row), middle) for row in a]
        np.testing.assert_allclose(batch, scalar, rtol=1e-12)


def test_alphas(equal):
    assert nontrivial_alphas(lagrange(equal), equal) == pytest.approx((4.5, 4.5))
    e = euler(equal, 2)
    a1, a2 = nontrivial_alphas(e, equal)
    assert a1 == pytest.approx(-1.4 * e.U_value) and a2 == pytest.approx(5.8 * e.U_value)
    m = MassTriple(1, 2, 3)
    L = lagrange(m)
    g1, g2 = (a / L.U_value for a in nontrivial_alphas(L, m))
    assert g1 + g2 == pytest.approx(3.0) and g1 * g2 == pytest.approx(lagrange_gamma_product(m))


def test_appendix_lagrange_matrix(rng):
    for m in [MassTriple(1, 1, 1)] + random_masses(rng, 5, 1.0):
        P = appendix_matrices(lagrange(m), m)
        assert np.trace(P) == pytest.approx(2.0, abs=1e-12)
        ev = np.sort(np.linalg.eigvals(P).real)
        # known eigenvalues 0, 0, 2, -1; the remaining two are beta1, beta2 with sum 1
        rest = list(ev)
        for known in (0.0, 0.0, 2.0, -1.0):
            rest.pop(int(np.argmin(np.abs(np.array(rest) - known))))
        b1, b2 = rest
        assert b1 + b2 == pytest.approx(1.0, abs=1e-10)
        assert (b1 + 1) * (b2 + 1) == pytest.approx(lagrange_gamma_product(m), abs=1e-10)
    assert lagrange_gamma_product(MassTriple(1, 1, 1)) == pytest.approx(2.25, abs=1e-12)


def test_appendix_euler_matrix(equal):
    m = MassTriple(1, 2, 3)
    for middle in (1, 2, 3):
        c = euler(m, middle)
        C = appendix_matrices(c, m)
        np.testing.assert_allclose(C @ np.ones(3), 0.0, atol=1e-12)
        x = c.c[0::2]
        np.testing.assert_allclose(C @ x, c.U_value * x, atol=1e-11)
        ev = np.sort(np.linalg.eigvals(C).real)
        tau = np.trace(C)
        np.testing.assert_allclose(ev, np.sort([0, c.U_value, tau - c.U_value]), atol=1e-10)


def test_restpoint_eigenvalues_lagrange_equal(equal):
    rep = restpoint_eigenvalues(lagrange(equal), "+", False, equal)
    v = np.sqrt(6.0)
    nontriv = [(-v / 4) * (1 + np.sqrt(13)), (-v / 4) * (1 - np.sqrt(13))] * 2
    expected = [v, v, -v / 2, 0.0] + nontriv
    assert match_multisets(rep.eigenvalues, expected) < 1e-12
    assert rep.k == 0.0


def test_restpoint_eigenvalues_euler_equal(equal):
    c = euler(equal, 2)
    rep = restpoint_eigenvalues(c, "+", True, equal)
    v = rep.v0
    pair1 = lambda_pair(v, -1.4 * c.U_value)
    assert abs(pair1[0].imag) > 0 and pair1[0].real == pytest.approx(-v / 4)
    assert rep.spiraling is True and rep.nu == pytest.approx(1.4)
    assert rep.eigenvalues[0] == pytest.approx(-v)
    assert sum(abs(e) < 1e-9 for e in rep.eigenvalues) == 1


def test_lambda_pair_sum_rule(rng):
    for _ in range(20):
        v, a = rng.uniform(-3, 3), rng.uniform(-10, 10)
        lp, lm = lambda_pair(v, a)
        assert lp + lm == pytest.approx(-v / 2)
        assert lp * lm == pytest.approx(-a)
    lp, lm = lambda_pair(2.0, -2.0**2 / 16)
    assert lp == lm == pytest.approx(-0.5)


def test_variational_matrices_structure(equal):
    c = lagrange(equal)
    A, B = build_variational_matrices(c, "+", False, equal)
    v = np.sqrt(2 * c.U_value)
    e0 = np.eye(13)[0]
    np.testing.assert_allclose(A @ e0, v * e0, atol=1e-14)
    Ai, _ = build_variational_matrices(c, "+", True, equal)
    np.testing.assert_allclose(Ai @ e0, -v * e0, atol=1e-14)
    sp = core.perp(c.c)
    w = np.concatenate([sp, v * sp])
    np.testing.assert_allclose(B @ w, 0.0, atol=1e-12)
    assert B.shape == (12, 12)


def test_numeric_crosscheck_all_restpoints():
    m = MassTriple(1, 2, 3)
    for c in all_central_configurations(m):
        for sign in "+-":
            for inf in (False, True):
                assert numeric_crosscheck(c, sign, inf, m) < 1e-8
    B = constrained_B(lagrange(m), "+", m)
    assert B.shape == (6, 6)


def test_sign_pattern_lagrange_infinity(rng):
    for m in random_masses(rng, 10, 1.0):
        for o in "+-":
            ev = np.array(restpoint_eigenvalues(lagrange(m, o), "+", True, m).eigenvalues)
            assert (np.sum(ev.real > 1e-12), np.sum(ev.real < -1e-12), np.sum(np.abs(ev) < 1e-12)) == (3, 4, 1)
        for middle in (1, 2, 3):
            a1, a2 = nontrivial_alphas(euler(m, middle), m)
            assert a1 * a2 < 0


def test_is_spiraling():
    for middle in (1, 2, 3):
        assert is_spiraling(MassTriple(1, 1, 1), middle)
        assert is_spiraling(MassTriple(5, 5, 5), middle)
    assert not is_spiraling(MassTriple(0.05, 0.9, 0.05), 2)


def test_boundary_band(monkeypatch):
    import parabolic3b.spectra as sp
    monkeypatch.setattr(sp, "nu_parameter", lambda m, middle=2: 0.125 + 1e-12)
    with pytest.raises(BoundaryError):
        sp.is_spiraling(MassTriple(1, 1, 1), 2)


def test_report_json(equal):
    rep = restpoint_eigenvalues(euler(equal, 1), "-", False, equal)
    d = json.loads(rep.to_json())
    assert len(d["eigenvalues"]) == 8 and all(len(p) == 2 for p in d["eigenvalues"])
    assert d["cc_kind"] == "euler1"


def test_simplex_grid_counts():
    idx, a = simplex_grid(10, margin=0.0)
    assert len(idx) == 55
    idx, a = simplex_grid(10, margin=1e-3)
    assert len(idx) == 55 - 3 * 10 + 3
    np.testing.assert_allclose(a.sum(axis=1), 1.0)


def test_mass_map_barycenter_and_vertices():
    cells = spiraling_region_scan(31, 1e-3)
    bary = [c for c in cells if np.allclose(c.masses, 1 / 3)]
    assert len(bary) == 1 and bary[0].in_spiraling_range
    for c in cells:
        k = int(np.argmax(c.masses))
        if c.masses[k] > 0.9:
            assert c.spiral_flags[k] is False
    text = mass_map_csv(cells)
    lines = text.strip().split("\n")
    assert lines[0] == "m1,m2,m3,nu1,nu2,nu3,spiral1,spiral2,spiral3,all"
    assert len(lines) == len(cells) + 1
