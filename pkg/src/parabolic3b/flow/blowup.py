"""McGehee blown-up coordinates (radial, s, z) and the vector field in both charts.

In the r-chart r = sqrt(I(q)), s = q / r, z = sqrt(r) * qdot and tau with
dt = r^{3/2} dtau.  The u-chart uses u = 1/r, valid for zero energy and
reaching the restpoints at infinity at u = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import core
from ..centralconfig import CentralConfiguration
from ..core import MassTriple, NormalizedConfiguration
from ..errors import SingularChartError

CHARTS = ("r", "u")


def _check_chart(chart):
    if chart not in CHARTS:
        raise ValueError(f"chart must be 'r' or 'u', got {chart!r}")
    return chart


@dataclass(frozen=True)
class BlownUpState:
    chart: str
    radial: float
    s: NormalizedConfiguration
    z: np.ndarray
    masses: MassTriple
    h: float = 0.0

    def __post_init__(self):
        _check_chart(self.chart)
        if self.chart == "u" and self.h != 0.0:
            raise ValueError("the u-chart is only used on the zero energy level (h = 0)")
        if self.radial < 0:
            raise ValueError("radial coordinate must be nonnegative")
        z = np.array(self.z, dtype=float).reshape(6)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @classmethod
    def from_arrays(cls, chart, radial, s, z, masses, h=0.0):
        return cls(chart, float(radial), NormalizedConfiguration.from_array(s, masses), z, masses, h)

    @classmethod
    def from_vector(cls, chart, y, masses, h=0.0):
        return cls.from_arrays(chart, y[0], y[1:7], y[7:13], masses, h)

    @classmethod
    def from_newtonian(cls, q, qdot, masses, chart="r", h=None):
        """Blow up a Newtonian state (centered q, qdot with zero momentum)."""
        r, s = core.normalize(q, masses)
        z = np.sqrt(r) * np.asarray(qdot, dtype=float)
        if h is None:
            h = float(core.kinetic_energy(qdot, masses) - core.potential(q, masses))
        if chart == "u":
            return cls("u", 1.0 / r, s, z, masses, 0.0)
        return cls("r", r, s, z, masses, h)

    @property
    def v(self) -> float:
        return float(core.mass_inner(self.s.s, self.z, self.masses))

    @property
    def r(self) -> float:
        if self.chart == "r":
            return self.radial
        if self.radial == 0:
            return np.inf
        return 1.0 / self.radial

    def vector(self) -> np.ndarray:
        return np.concatenate([[self.radial], self.s.s, self.z])

    def energy_residual(self) -> float:
        e = 0.5 * core.mass_inner(self.z, self.z, self.masses) - core.potential(self.s, self.masses)
        if self.chart == "r":
            e -= self.radial * self.h
        return float(e)

    def constraint_residuals(self) -> dict:
        return {
            "sphere": self.s.sphere_residual,
            "com_s": self.s.com_residual,
            "com_z": float(np.max(np.abs(core.center_of_mass_moment(self.z, self.masses)))),
        }

    def newtonian(self):
        """(q, qdot) in physical coordinates; needs radial > 0 (finite, nonzero r)."""
        r = self.r
        if not np.isfinite(r) or r <= 0:
            raise SingularChartError("state lies on the collision or infinity manifold")
        return r * self.s.s, self.z / np.sqrt(r)

    def dt_dtau(self) -> float:
        return time_rate(self.chart, self.radial)


def time_rate(chart, radial):
    """dt/dtau: r^{3/2} in the r-chart, u^{-3/2} in the u-chart."""
    if chart == "r":
        return radial ** 1.5
    return radial ** -1.5 if radial > 0 else np.inf


def rhs(y, masses: MassTriple, chart="r") -> np.ndarray:
    """The blown-up field on a raw 13-vector (radial, s, z)."""
    s = y[1:7]
    z = y[7:13]
    Md = masses.diag()
    v = np.dot(s * Md, z)
    out = np.empty(13)
    out[0] = v * y[0] if chart == "r" else -v * y[0]
    out[1:7] = z - v * s
    out[7:13] = core.grad_potential(s, masses) + 0.5 * v * z
    return out


def vector_field(state: BlownUpState) -> np.ndarray:
    return rhs(state.vector(), state.masses, state.chart)


def v_prime(state: BlownUpState) -> float:
    """dv/dtau = (|z|^2 - v^2)/2 + r h; nonnegative when h = 0 or r = 0."""
    zz = core.mass_inner(state.z, state.z, state.masses)
    out = 0.5 * (zz - state.v ** 2)
    if state.chart == "r":
        out += state.radial * state.h
    return float(out)


def jacobian(radial, s, z, masses: MassTriple, chart="r") -> np.ndarray:
    """Exact 13x13 Jacobian of rhs at (radial, s, z)."""
    s = np.asarray(s, dtype=float)
    z = np.asarray(z, dtype=float)
    Md = masses.diag()
    Ms = Md * s
    Mz = Md * z
    v = float(np.dot(Ms, z))
    I6 = np.eye(6)
    A = np.zeros((13, 13))
    sgn = 1.0 if chart == "r" else -1.0
    A[0, 0] = sgn * v
    A[0, 1:7] = sgn * radial * Mz
    A[0, 7:13] = sgn * radial * Ms
    A[1:7, 1:7] = -v * I6 - np.outer(s, Mz)
    A[1:7, 7:13] = I6 - np.outer(s, Ms)
    A[7:13, 1:7] = core.hessian_potential(s, masses) + 0.5 * np.outer(z, Mz)
    A[7:13, 7:13] = 0.5 * v * I6 + 0.5 * np.outer(z, Ms)
    return A


def jacobian_at(state: BlownUpState) -> np.ndarray:
    return jacobian(state.radial, state.s.s, state.z, state.masses, state.chart)


def energy_differential(state: BlownUpState) -> np.ndarray:
    """Gradient of H(s, z) - radial*h with respect to (radial, s, z), as a 13-vector."""
    Md = state.masses.diag()
    g = np.zeros(13)
    if state.chart == "r":
        g[0] = -state.h
    g[1:7] = -Md * core.grad_potential(state.s, state.masses)
    g[7:13] = Md * state.z
    return g


def constraint_differentials(state: BlownUpState) -> np.ndarray:
    """Rows whose kernel is the tangent space to the phase space: com of ds, <s,ds>, com of dz."""
    Md = state.masses.diag()
    rows = np.zeros((5, 13))
    rows[0, 1:7:2] = state.masses.array()
    rows[1, 2:7:2] = state.masses.array()
    rows[2, 1:7] = Md * state.s.s
    rows[3, 7:13:2] = state.masses.array()
    rows[4, 8:13:2] = state.masses.array()
    return rows


@dataclass(frozen=True)
class RestpointState:
    cc: CentralConfiguration
    sign: str
    at_infinity: bool
    state: BlownUpState

    @property
    def v0(self) -> float:
        return self.state.v


def restpoint(cc: CentralConfiguration, sign: str = "+", at_infinity: bool = True,
              radial: float = 0.0) -> RestpointState:
    """Equilibrium (radial, c, v0 c) with v0 = sign * sqrt(2 U(c)).

    `radial` other than zero gives the homothetic orbit through the restpoint's (s, z).
    """
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    v0 = (1.0 if sign == "+" else -1.0) * np.sqrt(2.0 * cc.U_value)
    st = BlownUpState("u" if at_infinity else "r", float(radial), cc.s, v0 * cc.c, cc.masses, 0.0)
    return RestpointState(cc, sign, bool(at_infinity), st)
