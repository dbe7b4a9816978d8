"""The five central configurations of three bodies and their homothetic parabolic orbits."""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import core
from .core import MassTriple, NormalizedConfiguration
from .errors import ConvergenceError, NonPositiveTimeError


class CCKind(str, Enum):
    LAGRANGE_POS = "lagrange+"
    LAGRANGE_NEG = "lagrange-"
    EULER1 = "euler1"
    EULER2 = "euler2"
    EULER3 = "euler3"

    @property
    def is_lagrange(self):
        return self in (CCKind.LAGRANGE_POS, CCKind.LAGRANGE_NEG)

    @property
    def middle(self):
        """Index (1-based) of the middle body for Euler kinds, else None."""
        return None if self.is_lagrange else int(self.value[-1])

    @classmethod
    def euler(cls, middle: int) -> "CCKind":
        return cls(f"euler{middle}")


@dataclass(frozen=True)
class CentralConfiguration:
    kind: CCKind
    s: NormalizedConfiguration
    U_value: float
    lam: float
    masses: MassTriple
    euler_root: float | None = None

    @property
    def c(self) -> np.ndarray:
        return self.s.s

    def residual(self) -> float:
        """Mass norm of the sphere gradient, zero at an exact CC."""
        return float(core.mass_norm(core.sphere_gradient(self.s, self.masses), self.masses))

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind.value,
            "s": [float(x) for x in self.c],
            "U": self.U_value,
            "lambda": self.lam,
            "residual": self.residual(),
            "com_residual": self.s.com_residual,
            "sphere_residual": self.s.sphere_residual,
        }
        if self.euler_root is not None:
            d["euler_root"] = self.euler_root
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _make(kind, q, masses, root=None) -> CentralConfiguration:
    q = core.center(q, masses)
    _, s = core.normalize(q, masses)
    U = float(core.potential(s, masses))
    return CentralConfiguration(kind, s, U, U, masses, root)


def lagrange(masses: MassTriple, orientation: str = "+") -> CentralConfiguration:
    if orientation not in ("+", "-"):
        raise ValueError(f"orientation must be '+' or '-', got {orientation!r}")
    sgn = 1.0 if orientation == "+" else -1.0
    q = np.array([0.0, 0.0, 1.0, 0.0, 0.5, sgn * np.sqrt(3.0) / 2])
    kind = CCKind.LAGRANGE_POS if sgn > 0 else CCKind.LAGRANGE_NEG
    return _make(kind, q, masses)


def _slots(middle: int):
    """(outer_low, middle, outer_high) as 0-based indices."""
    if middle not in (1, 2, 3):
        raise ValueError(f"middle must be 1, 2 or 3, got {middle!r}")
    j = middle - 1
    i, k = [n for n in range(3) if n != j]
    return i, j, k


def quintic_coefficients(masses: MassTriple, middle: int = 2) -> np.ndarray:
    """Coefficients of g(r), highest degree first, with bodies permuted so `middle` sits in slot 2."""
    return quintic_coefficients_batch(masses.array(), middle)


def _quintic_roots(coef) -> np.ndarray:
    """Positive roots of a batch of quintics, coefficients along axis 0 (highest first)."""
    coef = np.asarray(coef, dtype=float)

    def g(r):
        acc = np.zeros_like(r)
        for c in coef:
            acc = acc * r + c
        return acc

    def dg(r):
        acc = np.zeros_like(r)
        for n, c in enumerate(coef[:-1]):
            acc = acc * r + (5 - n) * c
        return acc

    shape = coef.shape[1:]
    lo = np.full(shape, 1e-6)
    hi = np.full(shape, 1e3)
    if not (np.all(g(lo) < 0) and np.all(g(hi) > 0)):
        raise ConvergenceError("quintic root is not bracketed by [1e-6, 1e3]")
    for _ in range(200):
        if np.all(hi - lo <= 1e-12):
            break
        mid = 0.5 * (lo + hi)
        neg = g(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    else:
        raise ConvergenceError("bisection stalled")
    r = 0.5 * (lo + hi)
    for _ in range(3):
        d = dg(r)
        r = np.where(d > 0, r - g(r) / np.where(d > 0, d, 1.0), r)
    scale = np.max(np.abs(coef), axis=0) * np.maximum(1.0, r**5)
    if np.any(np.abs(g(r)) > 1e-13 * scale):
        raise ConvergenceError("quintic residual too large after polishing")
    return r


def quintic_coefficients_batch(a, middle: int = 2) -> np.ndarray:
    """Quintic coefficients for mass arrays a[..., 3]; result has the degree on axis 0."""
    i, j, k = _slots(middle)
    a = np.asarray(a, dtype=float)
    m1, m2, m3 = a[..., i], a[..., j], a[..., k]
    return np.stack([m2 + m3, 2 * m2 + 3 * m3, m2 + 3 * m3,
                     -(3 * m1 + m2), -(3 * m1 + 2 * m2), -(m1 + m2)])


def euler_quintic_root(masses: MassTriple, middle: int = 2) -> float:
    """The unique positive root of g: bisection on [1e-6, 1e3] to width 1e-12, then Newton polish."""
    return float(_quintic_roots(quintic_coefficients(masses, middle)[:, None])[0])


def euler(masses: MassTriple, middle: int = 2) -> CentralConfiguration:
    i, j, k = _slots(middle)
    r = euler_quintic_root(masses, middle)
    x = np.zeros(3)
    x[i], x[j], x[k] = 0.0, r, 1.0 + r
    q = np.zeros(6)
    q[0::2] = x
    return _make(CCKind.euler(middle), q, masses, r)


def all_central_configurations(masses: MassTriple) -> list:
    return [lagrange(masses, "+"), lagrange(masses, "-"),
            euler(masses, 1), euler(masses, 2), euler(masses, 3)]


def by_kind(masses: MassTriple, kind) -> CentralConfiguration:
    kind = CCKind(kind)
    if kind is CCKind.LAGRANGE_POS:
        return lagrange(masses, "+")
    if kind is CCKind.LAGRANGE_NEG:
        return lagrange(masses, "-")
    return euler(masses, kind.middle)


@dataclass(frozen=True)
class HomotheticOrbit:
    cc: CentralConfiguration

    @property
    def scale_coefficient(self) -> float:
        return (4.5 * self.cc.U_value) ** (1.0 / 3.0)

    def radius(self, t):
        return self.scale_coefficient * _check_t(t) ** (2.0 / 3.0)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise NonPositiveTimeError("homothetic orbit needs t > 0")
    return t


def homothetic_position(orbit: HomotheticOrbit, t) -> np.ndarray:
    t = _check_t(t)
    return orbit.scale_coefficient * t[..., None] ** (2.0 / 3.0) * orbit.cc.c


def homothetic_velocity(orbit: HomotheticOrbit, t) -> np.ndarray:
    t = _check_t(t)
    return (2.0 / 3.0) * orbit.scale_coefficient * t[..., None] ** (-1.0 / 3.0) * orbit.cc.c
