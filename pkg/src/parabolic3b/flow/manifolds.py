"""Stable subspaces of restpoints and backward shooting along stable manifolds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import core
from ..errors import DegenerateSpectrumError
from ..spectra import tangent_space_basis
from .blowup import BlownUpState, RestpointState, jacobian_at
from .integrator import IntegratorOptions, Trajectory, _project, integrate

HYPERBOLIC_TOL = 1e-10


@dataclass
class StableSubspace:
    """Stable directions of a restpoint.

    `vectors` are eigenvectors (real and imaginary parts for complex pairs),
    each of unit Euclidean norm; `basis` is an orthonormal basis of their span.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray  # (k, 13)
    basis: np.ndarray  # (k, 13)
    all_eigenvalues: np.ndarray

    @property
    def dim(self):
        return len(self.vectors)


def tangent_spectrum(rp: RestpointState):
    """Eigenvalues and 13-dim eigenvectors of the Jacobian restricted to the phase space tangent."""
    st = rp.state
    A = jacobian_at(st)
    E = tangent_space_basis(st.s.s, st.masses)
    Ar = np.linalg.pinv(E) @ A @ E
    lam, W = np.linalg.eig(Ar)
    return lam, E @ W


def stable_subspace(rp: RestpointState) -> StableSubspace:
    lam, V = tangent_spectrum(rp)
    izero = int(np.argmin(np.abs(lam)))
    for k, l in enumerate(lam):
        if k != izero and abs(l.real) < HYPERBOLIC_TOL:
            raise DegenerateSpectrumError(f"eigenvalue {l} is not hyperbolic")
    e_r = np.zeros(13)
    e_r[0] = 1.0
    vals, vecs = [], []
    if rp.at_infinity and rp.v0 > 0:
        # the radial direction is exactly an eigenvector with eigenvalue -v
        vals.append(-rp.v0 + 0j)
        vecs.append(e_r)
        near = np.flatnonzero(np.abs(lam + rp.v0) < 1e-8 * max(1.0, rp.v0))
        skip = int(near[np.argmax(np.abs(V[0, near]))]) if len(near) else -1
    else:
        skip = -1
    used = set()
    for k in np.argsort(lam.real):
        if k == izero or k == skip or lam[k].real >= 0 or k in used:
            continue
        w = V[:, k]
        if abs(lam[k].imag) > 1e-12:
            j = int(np.argmin(np.abs(lam - np.conj(lam[k]))))
            used.add(j)
            used.add(k)
            for part in (w.real, w.imag):
                vals.append(lam[k])
                vecs.append(part / np.linalg.norm(part))
        else:
            used.add(k)
            w = w.real
            vals.append(lam[k])
            vecs.append(w / np.linalg.norm(w))
    vecs = np.array(vecs)
    Q, _ = np.linalg.qr(vecs.T)
    return StableSubspace(np.array(vals), vecs, Q.T, lam)


def energy_corrected(y, masses, chart="u", h=0.0):
    """Project (s, z) onto the constraints, then rescale z along s so the energy relation holds."""
    y, _ = _project(np.asarray(y, dtype=float), masses)
    s, z = y[1:7], y[7:13]
    Md = masses.diag()
    target = core.potential(s, masses) + (y[0] * h if chart == "r" else 0.0)
    # 1/2 |z + c s|^2 = target, smallest |c|
    b = np.dot(Md * s, z)
    cc = 0.5 * np.dot(Md * z, z) - target
    disc = b * b - 2 * cc
    if disc < 0:
        raise ValueError("cannot reach the energy level by moving z along s")
    roots = np.array([-b + np.sqrt(disc), -b - np.sqrt(disc)])
    c = roots[np.argmin(np.abs(roots))]
    y = y.copy()
    y[7:13] = z + c * s
    return y


def offset_state(rp: RestpointState, offset: float, direction) -> BlownUpState:
    st = rp.state
    y = st.vector() + offset * np.asarray(direction, dtype=float)
    y = energy_corrected(y, st.masses, st.chart, st.h)
    return BlownUpState.from_vector(st.chart, y, st.masses, st.h)


def shoot_stable_manifold(rp: RestpointState, offset: float, direction, tau_back: float,
                          opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate backward in tau from rp + offset * direction.

    The returned trajectory is stored with tau increasing, so read forward it
    approaches the restpoint.
    """
    if not (1e-8 <= offset <= 1e-4):
        raise ValueError("offset must lie in [1e-8, 1e-4]")
    direction = np.asarray(direction, dtype=float)
    if rp.at_infinity and direction[0] <= 0:
        raise ValueError("direction needs a positive radial component so that u > 0")
    start = offset_state(rp, offset, direction)
    return integrate(start, (0.0, -abs(tau_back)), opts)


def anchor_homothetic_time(traj: Trajectory, k: int = -1) -> Trajectory:
    """Shift Newtonian time so sample k (default: the last, nearest infinity) obeys t = (2/3) r^{3/2} / v.

    That is the relation on the homothetic orbit, so with k = -1 t carries
    the asymptotic origin of the parabolic motion.  k = 0 anchors at the
    earliest sample instead, which keeps early times accurate when the run
    spans many decades.
    """
    t_target = (2.0 / 3.0) * traj.r[k] ** 1.5 / abs(traj.v[k])
    return traj.retime(k, t_target)


def fit_power(t, y):
    """Least-squares slope of log y against log t."""
    return float(np.polyfit(np.log(t), np.log(y), 1)[0])


def parabolic_diagnostics(traj: Trajectory) -> dict:
    """Exponent of r(t) over the final decade of Newtonian time and the decay of K."""
    anchor_homothetic_time(traj)
    t, q, qdot = traj.newtonian()
    order = np.argsort(t)
    t, q, qdot = t[order], q[order], qdot[order]
    r = np.sqrt(core.moment_of_inertia(q, traj.masses))
    K = core.kinetic_energy(qdot, traj.masses)
    last = t >= t[-1] / 10.0
    if t[-1] / t[0] < 10 or np.sum(last) < 4:
        raise ValueError("trajectory does not span a full decade of Newtonian time")
    return {
        "exponent": fit_power(t[last], r[last]),
        "K_ratio": float(K[-1] / K[0]),
        "t_range": [float(t[0]), float(t[-1])],
    }
