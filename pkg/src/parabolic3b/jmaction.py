"""Action, Jacobi-Maupertuis length and discrete minimality probes for paths of three bodies.

Timed paths are interpolated by cubic splines in t; geometric quantities use
a cubic spline in cumulative mass-metric chord length, so they depend on
the nodes only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh

from . import core
from .core import MassTriple
from .errors import CollisionError

QUAD_POINTS = 512  # Simpson points per segment


@dataclass
class DiscretePath:
    nodes: np.ndarray  # (n, 6)
    masses: MassTriple
    times: np.ndarray | None = None

    def __post_init__(self):
        self.nodes = np.array(self.nodes, dtype=float).reshape(-1, 6)
        if len(self.nodes) < 2:
            raise ValueError("a path needs at least two nodes")
        if np.any(np.all(np.diff(self.nodes, axis=0) == 0, axis=1)):
            raise ValueError("consecutive nodes must differ")
        d = core.pair_distances(self.nodes)
        if np.min(d) < core.COLLISION_CUTOFF:
            raise CollisionError(f"node within {core.COLLISION_CUTOFF} of a collision")
        if self.times is not None:
            self.times = np.array(self.times, dtype=float)
            if self.times.shape != (len(self.nodes),) or np.any(np.diff(self.times) <= 0):
                raise ValueError("times must be strictly increasing, one per node")

    @property
    def timed(self):
        return self.times is not None

    def __len__(self):
        return len(self.nodes)

    def chord_parameter(self):
        steps = core.mass_norm(np.diff(self.nodes, axis=0), self.masses)
        return np.concatenate([[0.0], np.cumsum(steps)])

    def spline(self):
        """q(t) for timed paths."""
        if not self.timed:
            raise ValueError("path has no times")
        return CubicSpline(self.times, self.nodes, axis=0)

    def geometric_spline(self):
        return CubicSpline(self.chord_parameter(), self.nodes, axis=0)

    def retimed(self, times) -> "DiscretePath":
        return DiscretePath(self.nodes, self.masses, times)

    def rotated(self, angle) -> "DiscretePath":
        return DiscretePath(core.rotate(self.nodes, angle), self.masses, self.times)

    def to_dict(self):
        d = {"masses": list(self.masses), "nodes": self.nodes.tolist()}
        if self.timed:
            d["times"] = self.times.tolist()
        return d

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["nodes"], MassTriple.from_sequence(d["masses"]), d.get("times"))


def homothetic_path(cc, t0: float, t1: float, n: int = 64, timed: bool = True) -> DiscretePath:
    """Nodes of the homothetic parabolic orbit of a central configuration, geometric in time."""
    t = np.geomspace(t0, t1, n)
    q = (4.5 * cc.U_value) ** (1.0 / 3.0) * t[:, None] ** (2.0 / 3.0) * cc.c
    return DiscretePath(q, cc.masses, t if timed else None)


def _simpson_grid(knots, points):
    """Points and weights of composite Simpson on each interval of `knots`."""
    points += points % 2
    x = np.linspace(0.0, 1.0, points + 1)
    w = np.ones(points + 1)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    w /= 3.0 * points
    h = np.diff(knots)
    pts = knots[:-1, None] + h[:, None] * x
    wts = h[:, None] * w
    return pts.ravel(), wts.ravel()


def action(path: DiscretePath, points: int = QUAD_POINTS) -> float:
    """int K + U dt along the spline through the timed nodes."""
    sp = path.spline()
    t, w = _simpson_grid(path.times, points)
    q, qd = sp(t), sp(t, 1)
    L = core.kinetic_energy(qd, path.masses) + core.potential(q, path.masses)
    return float(np.dot(w, L))


def jm_length(path: DiscretePath, points: int = QUAD_POINTS) -> float:
    """int sqrt(2U) |dq|_m along the chord-length spline (independent of any times)."""
    sig = path.chord_parameter()
    sp = CubicSpline(sig, path.nodes, axis=0)
    x, w = _simpson_grid(sig, points)
    speed = core.mass_norm(sp(x, 1), path.masses)
    return float(np.dot(w, np.sqrt(2.0 * core.potential(sp(x), path.masses)) * speed))


def zero_energy_timing(path: DiscretePath, t0: float = 0.0, refine: int = 32,
                       points: int = 64) -> DiscretePath:
    """Timed path along the same geometric curve with |dq/dt|_m = sqrt(2U), i.e. K = U.

    The chord-length spline is resampled `refine` times per segment and the
    times come from dt = |dq|_m / sqrt(2U).
    """
    sig = path.chord_parameter()
    sp = CubicSpline(sig, path.nodes, axis=0)
    fine = np.concatenate([np.linspace(sig[k], sig[k + 1], refine + 1)[:-1] for k in range(len(sig) - 1)]
                          + [sig[-1:]])
    x, w = _simpson_grid(fine, points)
    rate = core.mass_norm(sp(x, 1), path.masses) / np.sqrt(2.0 * core.potential(sp(x), path.masses))
    dt = (w * rate).reshape(len(fine) - 1, -1).sum(axis=1)
    times = t0 + np.concatenate([[0.0], np.cumsum(dt)])
    return DiscretePath(sp(fine), path.masses, times)


def energy_residuals(path: DiscretePath) -> np.ndarray:
    """K - U at the nodes of a timed path."""
    sp = path.spline()
    return core.kinetic_energy(sp(path.times, 1), path.masses) - core.potential(path.nodes, path.masses)


# -- discrete minimality probe ------------------------------------------------------

def centered_basis(masses: MassTriple) -> np.ndarray:
    """4 x 6 mass-orthonormal basis of configurations with center of mass at the origin."""
    a = masses.array()
    C = np.zeros((2, 6))
    C[0, 0::2] = a
    C[1, 1::2] = a
    # null space of C in the mass metric: work with y = M^{1/2} x
    sq = np.sqrt(masses.diag())
    _, _, Vt = np.linalg.svd(C / sq)
    return Vt[2:] / sq


@dataclass
class ProbeResult:
    min_eigenvalue: float
    eigenvalues: np.ndarray
    worst_direction: np.ndarray  # (n_nodes, 6) displacement at the nodes
    worst_dilation: float
    hessian: np.ndarray
    gram: np.ndarray


def _metric_weight(q, masses):
    return core.mass_norm(q, masses) ** -3.0


def _basis_splines(times, t):
    """Values and derivatives at t of the cubic splines through unit node data."""
    n = len(times)
    sp = CubicSpline(times, np.eye(n), axis=0)
    return sp(t), sp(t, 1)


def local_minimizer_probe(path: DiscretePath, n_modes: int = 8, points: int = 32,
                          include_time: bool = True) -> ProbeResult:
    """Smallest eigenvalue of the action's Hessian over endpoint-fixing variations.

    Directions: |q| sin(k pi x) e_j at the interior nodes, with x the normalized
    log time (k = 1..n_modes, e_j a mass-orthonormal basis of centered
    configurations), plus a uniform dilation of the node times about the
    first node, which lets the duration vary.  The Hessian is exact for the
    spline discretization.  Eigenvalues are taken relative to
    int |w|_m^2 |q|_m^{-3} dt, which weighs a displacement w against the size
    of the configuration the way the potential term does.
    A negative eigenvalue rules out a local minimum; a nonnegative one is
    only a necessary condition.
    """
    t_nodes = path.times
    masses = path.masses
    Md = masses.diag()
    x_nodes = np.log(t_nodes / t_nodes[0]) / np.log(t_nodes[-1] / t_nodes[0]) if t_nodes[0] > 0 else \
        (t_nodes - t_nodes[0]) / (t_nodes[-1] - t_nodes[0])
    E = centered_basis(masses)
    size = core.mass_norm(path.nodes, masses)
    modes = []
    for k in range(1, n_modes + 1):
        prof = size * np.sin(k * np.pi * x_nodes)
        prof[[0, -1]] = 0.0
        for e in E:
            modes.append(prof[:, None] * e)
    modes = np.array(modes)  # (d, n, 6)
    t, w = _simpson_grid(t_nodes, points)
    B, dB = _basis_splines(t_nodes, t)
    W = np.einsum("qn,dnk->dqk", B, modes, optimize=True)
    dW = np.einsum("qn,dnk->dqk", dB, modes, optimize=True)
    sp = path.spline()
    q, qd = sp(t), sp(t, 1)
    HU = core.hessian_euclidean(q, masses)
    HW = np.einsum("qkl,bql->bqk", HU, W, optimize=True)
    d = len(modes)
    Wf, dWf, HWf = (X.reshape(d, -1) for X in (W * np.sqrt(w)[:, None], dW * np.sqrt(w)[:, None],
                                                 HW * np.sqrt(w)[:, None]))
    Mf = np.tile(Md, len(t))
    H = (dWf * Mf) @ dWf.T + Wf @ HWf.T
    g = _metric_weight(q, masses)
    G = (Wf * Mf * np.repeat(g, 6)) @ Wf.T
    if include_time:
        # t -> t0 + (1 + eps)(t - t0) with node values fixed; induced displacement -(t - t0) qdot
        gradU = core.grad_potential(q, masses) * Md
        mix = np.einsum("q,aqk,qk->a", w, dW * Md, -qd) + np.einsum("q,aqk,qk->a", w, W, gradU)
        kin = 2.0 * np.dot(w, core.kinetic_energy(qd, masses))
        Hf = np.zeros((d + 1, d + 1))
        Hf[:d, :d] = H
        Hf[:d, d] = Hf[d, :d] = mix
        Hf[d, d] = kin
        Gf = np.zeros_like(Hf)
        Gf[:d, :d] = G
        Gf[d, d] = np.dot(w * g, (t - t_nodes[0]) ** 2 * 2.0 * core.kinetic_energy(qd, masses))
        H, G = Hf, Gf
    H = 0.5 * (H + H.T)
    lam, V = eigh(H, G)
    v = V[:, 0]
    direction = np.einsum("d,dnk->nk", v[:len(modes)], modes)
    dil = float(v[len(modes)]) if include_time else 0.0
    return ProbeResult(float(lam[0]), lam, direction, dil, H, G)


def direction_cosine(path: DiscretePath, a, b) -> float:
    """Cosine between two node displacement fields in the probe's metric along the path."""
    t, w = _simpson_grid(path.times, 32)
    B, _ = _basis_splines(path.times, t)
    w = w * _metric_weight(path.spline()(t), path.masses)
    A = B @ np.asarray(a)
    Bb = B @ np.asarray(b)
    Md = path.masses.diag()
    ab = np.dot(w, np.sum(A * Md * Bb, axis=1))
    aa = np.dot(w, np.sum(A * Md * A, axis=1))
    bb = np.dot(w, np.sum(Bb * Md * Bb, axis=1))
    return float(ab / np.sqrt(aa * bb))
