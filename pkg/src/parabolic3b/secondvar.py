"""Second variation of the action along homothetic parabolic orbits.

For a variation rho(t)(c + phi(t) z) with z a mass-unit eigenvector of
D grad~ U(c) with eigenvalue alpha, the second variation is

    Q(phi; a, b) = int_a^b rho^2 phidot^2 + alpha rho^{-1} phi^2 dt

whose Euler-Lagrange equation reduces to t^2 y'' + (4/3) t y' + (2/9) nu y = 0
on Euler orbits (alpha = -U nu).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import core
from .centralconfig import CentralConfiguration
from .core import MassTriple
from .errors import NonPositiveTimeError, NotSpiralingError, QuadratureError, WindowError
from .spectra import is_spiraling, nontrivial_alphas, nu_parameter


def rho(c: CentralConfiguration, t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise NonPositiveTimeError("rho needs t > 0")
    return (4.5 * c.U_value) ** (1.0 / 3.0) * t ** (2.0 / 3.0)


# -- profiles ---------------------------------------------------------------

@dataclass
class VariationProfile:
    """phi sampled at N + 1 nodes spanning [a, b], zero at both ends.

    With grid='log' the nodes are uniform in ln t, which resolves profiles
    that oscillate in ln t over windows spanning many decades.
    """

    a: float
    b: float
    phi: np.ndarray
    z_direction: np.ndarray | None = None
    grid: str = "uniform"

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ValueError("need 0 < a < b")
        if self.grid not in ("uniform", "log"):
            raise ValueError("grid must be 'uniform' or 'log'")
        self.phi = np.array(self.phi, dtype=float)
        if len(self.phi) - 1 < 64:
            raise ValueError("profiles need N >= 64 intervals")
        if self.phi[0] != 0.0 or self.phi[-1] != 0.0:
            raise ValueError("profiles vanish at both ends")

    @property
    def N(self):
        return len(self.phi) - 1

    def x_nodes(self):
        if self.grid == "log":
            return np.linspace(np.log(self.a), np.log(self.b), self.N + 1)
        return np.linspace(self.a, self.b, self.N + 1)

    def times(self, x):
        return np.exp(x) if self.grid == "log" else x

    def spline(self):
        return CubicSpline(self.x_nodes(), self.phi)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.spline()(np.log(t) if self.grid == "log" else t)

    def scaled(self, lam: float) -> "VariationProfile":
        """phi_lam(t) = phi(t / lam) on [lam a, lam b]."""
        return VariationProfile(lam * self.a, lam * self.b, self.phi.copy(), self.z_direction, self.grid)

    def to_dict(self):
        return {"a": self.a, "b": self.b, "N": self.N, "grid": self.grid, "phi": self.phi.tolist(),
                "z_direction": None if self.z_direction is None else list(map(float, self.z_direction))}


def profile_from_function(f, a, b, N=4096, z_direction=None, grid="uniform") -> VariationProfile:
    x = np.linspace(np.log(a), np.log(b), N + 1) if grid == "log" else np.linspace(a, b, N + 1)
    t = np.exp(x) if grid == "log" else x
    phi = np.asarray(f(t), dtype=float).copy()
    phi[0] = phi[-1] = 0.0
    return VariationProfile(a, b, phi, z_direction, grid)


def _integrand_nodes(profile: VariationProfile, n: int):
    """Nodes x, times t, phi and dphi/dt on n subintervals of the profile's grid coordinate."""
    sp = profile.spline()
    x0, x1 = profile.x_nodes()[[0, -1]]
    x = np.linspace(x0, x1, n + 1)
    t = profile.times(x)
    phi = sp(x)
    dphi = sp(x, 1)
    jac = t if profile.grid == "log" else np.ones_like(x)
    return x, t, phi, dphi / jac, jac


def _q_parts(profile, c, alpha1, n):
    x, t, phi, dphi, jac = _integrand_nodes(profile, n)
    rh = rho(c, t)
    kin = simpson(rh**2 * dphi**2 * jac, x=x)
    pot = simpson(alpha1 / rh * phi**2 * jac, x=x)
    return kin, pot


@dataclass
class QValue:
    value: float
    error: float

    def __float__(self):
        return self.value


def q_form(profile: VariationProfile, c: CentralConfiguration, alpha1: float, n: int | None = None,
           check: bool = True) -> QValue:
    """Simpson quadrature of Q with a Richardson (n vs 2n) error estimate."""
    n = n or 2 * profile.N
    n += n % 2
    k1, p1 = _q_parts(profile, c, alpha1, n)
    k2, p2 = _q_parts(profile, c, alpha1, 2 * n)
    q1, q2 = k1 + p1, k2 + p2
    err = abs(q2 - q1) / 15.0
    scale = abs(k2) + abs(p2)
    if check and err > 1e-6 * abs(q2) and err > 1e-13 * scale:
        raise QuadratureError(f"quadrature error estimate {err:.3e} exceeds 1e-6 |Q| = {1e-6 * abs(q2):.3e}")
    return QValue(float(q2), float(err))


# -- the Euler-Lagrange equation ----------------------------------------------

@dataclass(frozen=True)
class IndicialData:
    nu: float
    discriminant: float
    roots: tuple
    oscillation_rate: float | None

    @property
    def spiraling(self):
        return self.discriminant < 0


def indicial(nu: float) -> IndicialData:
    """Roots of r^2 + r/3 + 2 nu / 9 = 0 and the oscillation rate sqrt(8 nu - 1)/6 when they are complex."""
    disc = (1.0 - 8.0 * nu) / 9.0
    sq = np.sqrt(complex(disc)) / 2.0
    roots = (-1.0 / 6.0 + sq, -1.0 / 6.0 - sq)
    omega = float(np.sqrt(-disc) / 2.0) if disc < 0 else None
    return IndicialData(float(nu), disc, roots, omega)


def disconjugacy_solution(nu: float, a: float, t, derivative: bool = False):
    """Solution of t^2 y'' + (4/3) t y' + (2/9) nu y = 0 with y(a) = 0, y'(a) = 1."""
    t = np.asarray(t, dtype=float)
    if a <= 0 or np.any(t <= 0):
        raise NonPositiveTimeError("need positive a and t")
    data = indicial(nu)
    L = np.log(t / a)
    env = (t / a) ** (-1.0 / 6.0)
    if data.oscillation_rate is not None:
        w = data.oscillation_rate
        y = a * env * np.sin(w * L) / w
        if derivative:
            return env / t * a * (np.cos(w * L) - np.sin(w * L) / (6 * w))
        return y
    if data.discriminant == 0:
        if derivative:
            return a * env / t * (1.0 - L / 6.0)
        return a * env * L
    r1, r2 = data.roots[0].real, data.roots[1].real
    if derivative:
        return a / (r1 - r2) * (r1 * (t / a) ** r1 - r2 * (t / a) ** r2) / t
    return a / (r1 - r2) * ((t / a) ** r1 - (t / a) ** r2)


def conjugate_points(nu: float, a: float, horizon: float) -> list:
    """Zeros of the disconjugacy solution in (a, horizon], found by a scan in ln t and refined by bisection."""
    if horizon <= a:
        raise ValueError("horizon must exceed a")
    data = indicial(nu)
    h = 0.05 if data.oscillation_rate is None else min(0.05, np.pi / (8 * data.oscillation_rate))
    x = np.arange(np.log(a) + h, np.log(horizon) + h, h)
    x[-1] = min(x[-1], np.log(horizon))
    x = x[x > np.log(a)]
    y = disconjugacy_solution(nu, a, np.exp(x))
    out = []
    for k in np.flatnonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0):
        lo, hi = np.exp(x[k]), np.exp(x[k + 1])
        out.append(brentq(lambda s: disconjugacy_solution(nu, a, s), lo, hi, xtol=1e-300, rtol=1e-12))
    return out


# -- negative directions --------------------------------------------------------

def alpha_eigenvector(c: CentralConfiguration, which: int = 1) -> tuple:
    """(alpha, z) for the nontrivial eigenvalue alpha_which of D grad~ U(c), z a mass-unit tangent vector."""
    masses = c.masses
    target = nontrivial_alphas(c, masses)[which - 1]
    Phi = core.sphere_tangent_basis(c.c, masses)
    G = core.hessian_potential(c.c, masses) + c.U_value * np.eye(6)
    S = Phi.T @ (masses.diag()[:, None] * (G @ Phi))
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    k = int(np.argmin(np.abs(w - target)))
    z = Phi @ V[:, k]
    return float(w[k]), z / core.mass_norm(z, masses)


@dataclass
class NegativeDirection:
    profile: VariationProfile
    Q: float
    quadrature_error: float
    alpha1: float
    nu: float
    omega: float
    window: tuple
    closed_form: float

    @property
    def margin(self):
        return abs(self.Q) / max(self.quadrature_error, 1e-300)

    def to_dict(self):
        d = self.profile.to_dict()
        d.update({"Q": self.Q, "quadrature_error": self.quadrature_error, "alpha1": self.alpha1,
                  "nu": self.nu, "margin": self.margin, "closed_form_Q": self.closed_form})
        return d


def arch_q_closed_form(c: CentralConfiguration, omega: float, kappa: float, t1: float, t2: float) -> float:
    """Q of phi = (t/t1)^{-1/6} sin(kappa ln(t/t1)) on [t1, t2]: (kappa^2 - omega^2) C^2 int t^{-2/3} phi^2 dt.

    Integrating by parts against the Euler-Lagrange operator leaves only the
    mismatch between kappa and the oscillation rate omega.
    """
    C = (4.5 * c.U_value) ** (1.0 / 3.0)
    L = np.log(t2 / t1)
    # int t^{-2/3} phi^2 dt = t1^{1/3} int_0^L sin^2(kappa x) dx in x = ln(t/t1)
    integral = t1 ** (1.0 / 3.0) * (L / 2 - np.sin(2 * kappa * L) / (4 * kappa))
    return float((kappa**2 - omega**2) * C**2 * integral)


def negative_direction(c: CentralConfiguration, masses: MassTriple | None = None, a: float = 1.0,
                       N: int = 4096) -> NegativeDirection:
    """A variation with Q < 0 along a spiraling Euler homothetic orbit.

    On [t1, t3], two consecutive conjugate intervals past a, take the arch
    phi = (t/t1)^{-1/6} sin(omega ln(t/t1) / 2).  It vanishes at both ends and
    oscillates slower than the Euler-Lagrange solution, which makes Q negative.
    """
    masses = masses or c.masses
    if c.kind.is_lagrange:
        raise NotSpiralingError("Lagrange orbits are disconjugate")
    middle = c.kind.middle
    if not is_spiraling(masses, middle):
        raise NotSpiralingError(f"nu = {nu_parameter(masses, middle):.6g} <= 1/8: no conjugate points")
    nu = nu_parameter(masses, middle)
    alpha1, z = alpha_eigenvector(c, 1)
    omega = indicial(nu).oscillation_rate
    t1 = a * np.exp(np.pi / omega)
    t3 = a * np.exp(3 * np.pi / omega)
    kappa = omega / 2
    prof = profile_from_function(lambda t: (t / t1) ** (-1.0 / 6.0) * np.sin(kappa * np.log(t / t1)),
                                 t1, t3, N, z, grid="log")
    q = q_form(prof, c, alpha1)
    return NegativeDirection(prof, q.value, q.error, alpha1, nu, omega, (float(t1), float(t3)),
                             arch_q_closed_form(c, omega, kappa, t1, t3))


def scaling_identity_check(profile: VariationProfile, lam: float, alpha1: float,
                           c: CentralConfiguration) -> float:
    """Relative gap between Q(phi_lam; lam a, lam b) and lam^{1/3} Q(phi; a, b)."""
    q1 = q_form(profile, c, alpha1).value
    ql = q_form(profile.scaled(lam), c, alpha1).value
    ref = lam ** (1.0 / 3.0) * q1
    return abs(ql - ref) / abs(ref)


# -- second variation along a perturbed orbit -------------------------------------

@dataclass
class NewtonianPath:
    """q(t) samples with a cubic interpolant in ln t (times must be positive, increasing)."""

    t: np.ndarray
    q: np.ndarray
    masses: MassTriple

    def __post_init__(self):
        order = np.argsort(self.t)
        self.t = np.asarray(self.t, dtype=float)[order]
        self.q = np.asarray(self.q, dtype=float)[order]
        keep = np.concatenate([[True], np.diff(self.t) > 0])
        self.t, self.q = self.t[keep], self.q[keep]
        self._sp = CubicSpline(np.log(self.t), self.q, axis=0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t[0] * (1 - 1e-12)) or np.any(t > self.t[-1] * (1 + 1e-12)):
            raise WindowError(f"window [{t.min():.4g}, {t.max():.4g}] is outside samples "
                              f"[{self.t[0]:.4g}, {self.t[-1]:.4g}]")
        return self._sp(np.log(t))

    @classmethod
    def from_trajectory(cls, traj):
        t, q, _ = traj.newtonian()
        ok = t > 0
        return cls(t[ok], q[ok], traj.masses)

    @classmethod
    def homothetic(cls, c: CentralConfiguration, t0: float, t1: float, n: int = 2000):
        t = np.geomspace(t0, t1, n)
        return cls(t, rho(c, t)[:, None] * c.c, c.masses)


@dataclass
class OrbitSecondVariation:
    value: float
    Q: float
    correction: float
    quadrature_error: float


def second_variation_along_orbit(path, profile: VariationProfile, c: CentralConfiguration,
                                 alpha1: float | None = None) -> OrbitSecondVariation:
    """Q plus int rho^{-1} (D^2U(c + beta) - D^2U(c))(z, z) phi^2 dt with beta = q / rho - c.

    `path` is a NewtonianPath or a blown-up Trajectory whose time is already anchored.
    """
    if not isinstance(path, NewtonianPath):
        path = NewtonianPath.from_trajectory(path)
    if alpha1 is None:
        alpha1, _ = alpha_eigenvector(c, 1)
    z = profile.z_direction
    if z is None:
        raise ValueError("profile needs a z_direction")
    q = q_form(profile, c, alpha1)
    H0 = float(z @ core.hessian_euclidean(c.c, c.masses) @ z)

    def corr(n):
        x, t, phi, _, jac = _integrand_nodes(profile, n)
        rh = rho(c, t)
        Q_t = path(t)
        beta = Q_t / rh[:, None] - c.c
        dH = np.einsum("i,nij,j->n", z, core.hessian_euclidean(c.c + beta, c.masses), z) - H0
        return simpson(dH * phi**2 / rh * jac, x=x)

    n = max(512, profile.N // 4)
    n += n % 2
    c1, c2 = corr(n), corr(2 * n)
    err = q.error + abs(c2 - c1) / 15.0
    return OrbitSecondVariation(q.value + c2, q.value, float(c2), float(err))


def lambda_threshold(path: NewtonianPath, profile: VariationProfile, c: CentralConfiguration,
                     lam0: float | None = None, lam_max: float = 2.0**20, sweep: bool = False):
    """Double lambda until the second variation on [lam a, lam b] is negative with a 10x margin.

    Returns (lambda, history) where history lists (lambda, value, Q, correction).
    lambda is None if no window up to lam_max (or the end of the samples)
    qualifies.  With sweep=True the doubling continues to the end so the
    history can be used to fit the decay of the correction.
    """
    alpha1, _ = alpha_eigenvector(c, 1)
    lam = lam0 or max(1.0, path.t[0] / profile.a)
    found = None
    history = []
    while lam <= lam_max:
        prof = profile.scaled(lam)
        if prof.b > path.t[-1]:
            break
        sv = second_variation_along_orbit(path, prof, c, alpha1)
        history.append((lam, sv.value, sv.Q, sv.correction))
        if found is None and sv.value < 0 and abs(sv.value) > 10 * sv.quadrature_error:
            found = lam
            if not sweep:
                break
        lam *= 2
    return found, history


def correction_decay_power(history) -> float:
    """Slope of log |correction| / lambda^{1/3} against log lambda (negative means the correction fades)."""
    lam = np.array([h[0] for h in history])
    corr = np.abs(np.array([h[3] for h in history]))
    return float(np.polyfit(np.log(lam), np.log(corr / lam ** (1.0 / 3.0)), 1)[0])


def to_json(obj) -> str:
    return json.dumps(obj.to_dict())
