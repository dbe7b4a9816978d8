"""Mass-metric geometry and the Newtonian potential of the planar three-body problem.

Configurations and velocities are flat 6-vectors ordered
``(q1x, q1y, q2x, q2y, q3x, q3y)``.  All inner products are taken in the
mass metric ``<v, w>_m = sum_i m_i v_i . w_i``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    CollisionError,
    InvalidMassError,
    NotCenteredError,
    ZeroConfigurationError,
)

COLLISION_CUTOFF = 1e-13
CENTERING_TOL = 1e-10
PAIRS = ((0, 1), (0, 2), (1, 2))

# (x1, x2, x3, y1, y2, y3) <- (x1, y1, x2, y2, x3, y3)
XY_ORDER = np.array([0, 2, 4, 1, 3, 5])


@dataclass(frozen=True)
class MassTriple:
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        for name in ("m1", "m2", "m3"):
            val = float(getattr(self, name))
            if not np.isfinite(val) or val <= 0:
                raise InvalidMassError(f"{name} must be a positive finite number, got {val!r}")
            object.__setattr__(self, name, val)

    @classmethod
    def from_sequence(cls, values) -> "MassTriple":
        values = list(values)
        if len(values) != 3:
            raise InvalidMassError(f"expected three masses, got {len(values)}")
        return cls(*values)

    @property
    def m(self) -> float:
        return self.m1 + self.m2 + self.m3

    def array(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3])

    def diag(self) -> np.ndarray:
        """Diagonal of the 6x6 mass matrix M."""
        return np.repeat(self.array(), 2)

    def permuted(self, order) -> "MassTriple":
        a = self.array()
        return MassTriple(*a[list(order)])

    def scaled(self, factor: float) -> "MassTriple":
        return MassTriple(self.m1 * factor, self.m2 * factor, self.m3 * factor)

    def __iter__(self):
        return iter((self.m1, self.m2, self.m3))


@dataclass(frozen=True)
class NormalizedConfiguration:
    """A centered configuration on the unit sphere I(s) = 1.

    Residuals are recorded at construction rather than re-projected, so
    constraint drift stays visible downstream.
    """

    s: np.ndarray
    com_residual: float
    sphere_residual: float

    @classmethod
    def from_array(cls, s, masses: MassTriple) -> "NormalizedConfiguration":
        s = np.array(s, dtype=float).reshape(6)
        s.setflags(write=False)
        return cls(s, float(np.max(np.abs(center_of_mass_moment(s, masses)))),
                   float(abs(mass_inner(s, s, masses) - 1.0)))


def as_config(q) -> np.ndarray:
    if isinstance(q, NormalizedConfiguration):
        return q.s
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 6:
        raise ValueError(f"configurations are 6-vectors, got shape {q.shape}")
    return q


def mass_inner(a, b, masses: MassTriple):
    return np.sum(as_config(a) * masses.diag() * as_config(b), axis=-1)


def mass_norm(a, masses: MassTriple):
    return np.sqrt(mass_inner(a, a, masses))


def center_of_mass_moment(q, masses: MassTriple) -> np.ndarray:
    """sum_i m_i q_i, a planar vector; zero for centered configurations."""
    q = as_config(q).reshape(q.shape[:-1] + (3, 2)) if np.ndim(q) > 1 else as_config(q).reshape(3, 2)
    return np.tensordot(masses.array(), q, axes=([0], [-2]))


def center(q, masses: MassTriple) -> np.ndarray:
    q = as_config(q)
    bodies = q.reshape(q.shape[:-1] + (3, 2))
    com = np.tensordot(masses.array(), bodies, axes=([0], [-2])) / masses.m
    return (bodies - com[..., None, :]).reshape(q.shape)


def perp(q) -> np.ndarray:
    """Rotate every body by +90 degrees: (x, y) -> (-y, x)."""
    q = as_config(q)
    out = np.empty_like(q)
    out[..., 0::2] = -q[..., 1::2]
    out[..., 1::2] = q[..., 0::2]
    return out


def rotate(q, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    q = as_config(q)
    out = np.empty_like(q)
    out[..., 0::2] = c * q[..., 0::2] - s * q[..., 1::2]
    out[..., 1::2] = s * q[..., 0::2] + c * q[..., 1::2]
    return out


def pair_distances(q) -> np.ndarray:
    """(r12, r13, r23) for a configuration or a stack of them."""
    b = as_config(q).reshape(np.shape(q)[:-1] + (3, 2))
    return np.stack([np.linalg.norm(b[..., i, :] - b[..., j, :], axis=-1) for i, j in PAIRS], axis=-1)


def _check_collision(r):
    if np.any(r < COLLISION_CUTOFF):
        raise CollisionError(f"mutual distance {float(np.min(r)):.3e} below cutoff {COLLISION_CUTOFF}")


def potential(q, masses: MassTriple):
    """U(q) = sum_{i<j} m_i m_j / r_ij (the negative of the potential energy)."""
    r = pair_distances(q)
    _check_collision(r)
    a = masses.array()
    w = np.array([a[i] * a[j] for i, j in PAIRS])
    return np.sum(w / r, axis=-1)


def moment_of_inertia(q, masses: MassTriple):
    """<q, q>_m, the moment of inertia about the origin."""
    return mass_inner(q, q, masses)


def moment_of_inertia_pairwise(q, masses: MassTriple):
    """Translation-invariant form (m1 m2 r12^2 + m1 m3 r13^2 + m2 m3 r23^2) / m."""
    r = pair_distances(q)
    a = masses.array()
    w = np.array([a[i] * a[j] for i, j in PAIRS])
    return np.sum(w * r**2, axis=-1) / masses.m


def kinetic_energy(v, masses: MassTriple):
    return 0.5 * mass_inner(v, v, masses)


def grad_potential(q, masses: MassTriple) -> np.ndarray:
    """Mass-metric gradient of U: dU(q)h = <grad_m U(q), h>_m."""
    q = as_config(q)
    _check_collision(pair_distances(q))
    b = q.reshape(q.shape[:-1] + (3, 2))
    a = masses.array()
    g = np.zeros_like(b)
    for i, j in PAIRS:
        d = b[..., i, :] - b[..., j, :]
        r3 = np.linalg.norm(d, axis=-1)[..., None] ** 3
        g[..., i, :] -= a[j] * d / r3
        g[..., j, :] += a[i] * d / r3
    return g.reshape(q.shape)


def hessian_euclidean(q, masses: MassTriple) -> np.ndarray:
    """The symmetric 6x6 Hessian D^2 U(q) in 2x2 blocks; batches give (..., 6, 6).

    D_ij = m_i m_j / r_ij^3 (Id - 3 u_ij u_ij^T) for i != j and
    D_ii = -sum_{j != i} D_ij.
    """
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 6:
        raise ValueError(f"configurations are 6-vectors, got shape {q.shape}")
    _check_collision(pair_distances(q))
    b = q.reshape(q.shape[:-1] + (3, 2))
    a = masses.array()
    H = np.zeros(q.shape[:-1] + (6, 6))
    for i, j in PAIRS:
        d = b[..., i, :] - b[..., j, :]
        r = np.linalg.norm(d, axis=-1)[..., None, None]
        u = d[..., :, None] * d[..., None, :] / r**2
        blk = a[i] * a[j] / r**3 * (np.eye(2) - 3.0 * u)
        H[..., 2 * i:2 * i + 2, 2 * j:2 * j + 2] = blk
        H[..., 2 * j:2 * j + 2, 2 * i:2 * i + 2] = blk
        H[..., 2 * i:2 * i + 2, 2 * i:2 * i + 2] -= blk
        H[..., 2 * j:2 * j + 2, 2 * j:2 * j + 2] -= blk
    return H


def hessian_potential(q, masses: MassTriple) -> np.ndarray:
    """Jacobian of the mass-metric gradient, D grad_m U = M^-1 D^2 U.

    Not symmetric as a matrix, but M times it is.
    """
    return hessian_euclidean(q, masses) / masses.diag()[:, None]


def sphere_gradient(s, masses: MassTriple) -> np.ndarray:
    """Gradient of U restricted to the sphere I = 1: grad_m U(s) + U(s) s."""
    s = as_config(s)
    return grad_potential(s, masses) + potential(s, masses) * s


def normalize(q, masses: MassTriple) -> tuple[float, NormalizedConfiguration]:
    q = as_config(q)
    com = center_of_mass_moment(q, masses)
    scale = max(1.0, float(np.max(np.abs(q))) * masses.m)
    if np.max(np.abs(com)) > CENTERING_TOL * scale:
        raise NotCenteredError(f"center-of-mass moment {com} is not zero")
    r = float(np.sqrt(moment_of_inertia(q, masses)))
    if r == 0.0:
        raise ZeroConfigurationError("cannot normalize the zero configuration (triple collision)")
    return r, NormalizedConfiguration.from_array(q / r, masses)


def to_xy_layout(q) -> np.ndarray:
    """Reorder (x1,y1,x2,y2,x3,y3) into (x1,x2,x3,y1,y2,y3)."""
    return as_config(q)[..., XY_ORDER]


def from_xy_layout(q) -> np.ndarray:
    out = np.empty_like(q)
    out[..., XY_ORDER] = q
    return out


def xy_permutation_matrix() -> np.ndarray:
    """P with to_xy_layout(q) == P @ q."""
    return np.eye(6)[XY_ORDER]


def sphere_tangent_basis(s, masses: MassTriple) -> np.ndarray:
    """A mass-orthonormal basis (6x3 columns) of the tangent space to I = 1 at s.

    The space is {d : sum m_i d_i = 0, <s, d>_m = 0}; the first column is s_perp
    normalized, the generator of rotations.
    """
    s = as_config(s)
    W = np.sqrt(masses.diag())
    # translations and s in sqrt(M)-coordinates, then complete to an orthonormal frame
    tx = np.tile([1.0, 0.0], 3)
    ty = np.tile([0.0, 1.0], 3)
    sp = perp(s)
    cols = [W * tx, W * ty, W * s, W * sp]
    Q, _ = np.linalg.qr(np.column_stack(cols + [np.eye(6)[:, k] for k in range(6)]))
    # QR of the first four fixes their span; columns 3.. complete the frame
    basis = Q[:, 3:6] / W[:, None]
    # make the first column exactly the normalized s_perp direction (up to sign)
    sign = np.sign(mass_inner(basis[:, 0], sp, masses)) or 1.0
    basis[:, 0] *= sign
    return basis


def config_to_json(q) -> str:
    return json.dumps([float(x) for x in as_config(q)])


def config_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    if len(data) != 6:
        raise ValueError(f"expected a JSON array of 6 numbers, got {len(data)}")
    return np.array(data, dtype=float)


def pairwise_products(masses: MassTriple) -> float:
    """m1 m2 + m1 m3 + m2 m3."""
    return sum(a * b for a, b in combinations(masses.array(), 2))
