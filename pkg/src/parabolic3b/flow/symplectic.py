"""Pullbacks of the canonical symplectic form to the blown-up charts, and the Lagrangian diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import core
from ..centralconfig import CentralConfiguration
from ..errors import SingularChartError
from ..spectra import lagrange_k
from .blowup import BlownUpState, constraint_differentials, energy_differential, restpoint
from .integrator import IntegratorOptions, integrate_with_variation
from .manifolds import offset_state, stable_subspace


FLOOR_FACTOR = 10.0


def _wedge(x_a, y_b, x_b, y_a):
    return x_a * y_b - x_b * y_a


def symplectic_terms(state: BlownUpState, a, b) -> np.ndarray:
    """The three terms of the pulled-back form on (a, b).

    r-chart:  sum m (r^{1/2} ds^dz + r^{-1/2} dr^(s.dz) + 1/2 r^{-1/2} dr^(z.ds))
    u-chart:  sum m (u^{-1/2} ds^dz + u^{-3/2} (s.dz)^du + 1/2 u^{-3/2} (z.ds)^du)
    with (alpha ^ beta)(a, b) = alpha(a) beta(b) - alpha(b) beta(a).
    """
    x = state.radial
    if x <= 0:
        raise SingularChartError("the symplectic form is singular on the radial = 0 manifold")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    Md = state.masses.diag()
    s, z = state.s.s, state.z
    dsa, dza, dsb, dzb = a[1:7], a[7:13], b[1:7], b[7:13]
    t1 = np.dot(Md * dsa, dzb) - np.dot(Md * dsb, dza)
    sdz_a, sdz_b = np.dot(Md * s, dza), np.dot(Md * s, dzb)
    zds_a, zds_b = np.dot(Md * z, dsa), np.dot(Md * z, dsb)
    if state.chart == "r":
        return np.array([
            np.sqrt(x) * t1,
            _wedge(a[0], sdz_b, b[0], sdz_a) / np.sqrt(x),
            0.5 * _wedge(a[0], zds_b, b[0], zds_a) / np.sqrt(x),
        ])
    return np.array([
        t1 / np.sqrt(x),
        _wedge(sdz_a, b[0], sdz_b, a[0]) * x ** -1.5,
        0.5 * _wedge(zds_a, b[0], zds_b, a[0]) * x ** -1.5,
    ])


def symplectic_form(state: BlownUpState, a, b) -> float:
    return float(np.sum(symplectic_terms(state, a, b)))


def newtonian_map(chart, y):
    """(radial, s, z) -> (q, qdot) = (r s, z / sqrt(r))."""
    r = y[0] if chart == "r" else 1.0 / y[0]
    return np.concatenate([r * y[1:7], y[7:13] / np.sqrt(r)])


def pullback_by_differences(state: BlownUpState, a, b, step=1e-6) -> float:
    """sum m (dq(a).dqdot(b) - dq(b).dqdot(a)) with the differential of the chart map taken numerically."""
    y = state.vector()
    Md = state.masses.diag()

    def push(w):
        w = np.asarray(w, dtype=float)
        return (newtonian_map(state.chart, y + step * w) - newtonian_map(state.chart, y - step * w)) / (2 * step)

    pa, pb = push(a), push(b)
    return float(np.dot(Md * pa[:6], pb[6:]) - np.dot(Md * pb[:6], pa[6:]))


def energy_tangent_projector(state: BlownUpState) -> np.ndarray:
    """Orthogonal projector onto vectors tangent to the phase space and to the energy level."""
    C = np.vstack([constraint_differentials(state), energy_differential(state)])
    # null space through the SVD
    _, sv, Vt = np.linalg.svd(C)
    rank = int(np.sum(sv > 1e-12 * sv[0]))
    N = Vt[rank:].T
    return N @ N.T


def random_energy_tangents(state: BlownUpState, n, rng) -> list:
    P = energy_tangent_projector(state)
    out = []
    for _ in range(n):
        w = P @ rng.standard_normal(13)
        out.append(w / np.linalg.norm(w))
    return out


def form_along(traj, i, j):
    """Omega(p(tau))(a_i(tau), a_j(tau)) at every sample of a trajectory with tangents."""
    return np.array([symplectic_form(traj.state(k), traj.tangents[k, i], traj.tangents[k, j])
                     for k in range(len(traj))])


@dataclass
class LagrangianReport:
    v: float
    k: float
    lambda_w: float
    bound: float
    stable_dim: int
    sign_pattern: tuple
    graph_condition: float
    slopes: list = field(default_factory=list)
    initial_omega: list = field(default_factory=list)
    signed_omega: list = field(default_factory=list)

    @property
    def max_slope(self):
        return max(self.slopes)

    def passed(self):
        return (self.stable_dim == 4 and self.sign_pattern == (3, 4, 1)
                and self.graph_condition < 1e6 and self.max_slope <= self.bound)


def graph_condition_number(rp, ss=None) -> float:
    """Condition number of the projection of the stable space onto (du, ds) in tangent coordinates."""
    ss = ss or stable_subspace(rp)
    Phi = core.sphere_tangent_basis(rp.state.s.s, rp.state.masses)
    Md = rp.state.masses.diag()
    Pm = np.array([np.concatenate([[w[0]], Phi.T @ (Md * w[1:7])]) for w in ss.basis]).T
    return float(np.linalg.cond(Pm))


def lagrangian_graph_diagnostics(cc: CentralConfiguration, probes: int = 3, offset: float = 1e-6,
                                 span: float = 10.0, seed: int = 0,
                                 opts: IntegratorOptions | None = None) -> LagrangianReport:
    """Graph and Lagrangian checks for the stable manifold of a Lagrange restpoint at infinity (v > 0).

    Probe points start at l + offset * theta with theta in the span of the
    radial direction and the two nontrivial attracting eigenvectors.  Those
    eigenvectors are propagated backward in tau along the probe, which pulls
    them onto the tangent spaces of the stable manifold.  Read forward, the
    envelope sum |terms of Omega_u| is fitted against tau over a window of
    length span / v, using the samples where it stays above ten times the
    signed form.  The signed form is constant along the flow and reported too.
    """
    if not cc.kind.is_lagrange:
        raise ValueError("the Lagrangian diagnostics apply to Lagrange restpoints")
    masses = cc.masses
    rp = restpoint(cc, "+", at_infinity=True)
    v = rp.v0
    ss = stable_subspace(rp)
    lam = ss.all_eigenvalues
    tol = 1e-9 * max(1.0, v)
    pattern = (int(np.sum(lam.real > tol)), int(np.sum(lam.real < -tol)), int(np.sum(np.abs(lam) <= tol)))
    k = lagrange_k(masses)
    lam_w = -v / 4 * (1 + np.sqrt(13 - 12 * np.sqrt(k)))
    report = LagrangianReport(v, k, lam_w, v / 2 + lam_w + 0.05 * v, ss.dim, pattern,
                              graph_condition_number(rp, ss))
    # attracting eigenvectors other than the rotation partner -v/2
    keep = [i for i, l in enumerate(ss.eigenvalues) if abs(l.real + v / 2) > 1e-6 * v]
    W = ss.vectors[keep]
    rng = np.random.default_rng(seed)
    opts = opts or IntegratorOptions()
    for _ in range(probes):
        coef = rng.uniform(-0.5, 0.5, len(W))
        coef[0] = 1.0  # W[0] is the radial direction
        theta = coef @ W
        theta /= np.linalg.norm(theta)
        start = offset_state(rp, offset, theta)
        P = energy_tangent_projector(start)
        traj = integrate_with_variation(start, [P @ w for w in W], (0.0, -span / v), opts)
        for i in range(len(W)):
            for j in range(i + 1, len(W)):
                env = np.array([np.sum(np.abs(symplectic_terms(traj.state(n), traj.tangents[n, i],
                                                                traj.tangents[n, j])))
                                for n in range(len(traj))])
                om = form_along(traj, i, j)
                # the signed form is conserved, so env cannot fall below |om|; that floor is the
                # error of starting the tangents at a finite offset and carries no decay information
                above = env > FLOOR_FACTOR * np.abs(om)
                if np.sum(above) < 8:
                    above = np.ones_like(env, dtype=bool)
                slope = float(np.polyfit(traj.tau[above], np.log(env[above]), 1)[0])
                report.slopes.append(slope)
                report.initial_omega.append(float(om[-1]))  # the probe point is the last sample
                report.signed_omega.append(om.tolist())
    return report
