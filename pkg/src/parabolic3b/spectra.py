"""Restpoint spectra of the blown-up flow, the Euler nu parameter and the spiraling classifier."""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import core
from .centralconfig import (
    CCKind,
    CentralConfiguration,
    _quintic_roots,
    _slots,
    euler_quintic_root,
    quintic_coefficients_batch,
)
from .core import MassTriple
from .errors import BoundaryError

BOUNDARY_BAND = 1e-10


def lagrange_k(masses: MassTriple) -> float:
    m1, m2, m3 = masses
    return ((m1 - m2) ** 2 + (m1 - m3) ** 2 + (m2 - m3) ** 2) / (2.0 * masses.m ** 2)


def _nu_closed(m1, m2, m3, r):
    num = m1 * (1 + 3 * r + 3 * r**2) + m3 * (3 * r**2 + 3 * r**3 + r**4)
    den = (m1 + m3) * r**2 + m2 * (1 + r) ** 2 * (1 + r**2)
    return num / den


def nu_parameter(masses: MassTriple, middle: int = 2) -> float:
    """Shape parameter of the Euler configuration with body `middle` between the others."""
    i, j, k = _slots(middle)
    a = masses.array()
    r = euler_quintic_root(masses, middle)
    return float(_nu_closed(a[i], a[j], a[k], r))


def nu_parameter_batch(a, middle: int = 2) -> np.ndarray:
    """nu for many mass triples a[..., 3] at once."""
    i, j, k = _slots(middle)
    a = np.asarray(a, dtype=float)
    r = _quintic_roots(quintic_coefficients_batch(a, middle))
    return _nu_closed(a[..., i], a[..., j], a[..., k], r)


def lambda_pair(v, alpha):
    """Roots of lam^2 + v lam / 2 - alpha = 0, as complex numbers (+ root first)."""
    d = np.sqrt(complex(v * v + 16.0 * alpha))
    return (-v + d) / 4.0, (-v - d) / 4.0


def nontrivial_alphas(cc: CentralConfiguration, masses: MassTriple):
    U = cc.U_value
    if cc.kind.is_lagrange:
        rk = np.sqrt(lagrange_k(masses))
        return 1.5 * U * (1 + rk), 1.5 * U * (1 - rk)
    nu = nu_parameter(masses, cc.kind.middle)
    return -U * nu, U * (3 + 2 * nu)


def appendix_matrices(cc: CentralConfiguration, masses: MassTriple) -> np.ndarray:
    """P = (I/U) M^-1 D^2U for Lagrange kinds, the 3x3 block C for Euler kinds.

    For a collinear configuration on the x-axis M^-1 D^2U in (x1,x2,x3,y1,y2,y3)
    order is [[2C, 0], [0, -C]].
    """
    G = core.hessian_potential(cc.c, masses)
    if cc.kind.is_lagrange:
        I = core.moment_of_inertia(cc.c, masses)
        return I / cc.U_value * G
    Pm = core.xy_permutation_matrix()
    Gxy = Pm @ G @ Pm.T
    return -Gxy[3:, 3:]


def nu_from_matrix(cc: CentralConfiguration, masses: MassTriple) -> float:
    """Independent oracle for nu: I tau / U - 2 with tau the trace of C."""
    C = appendix_matrices(cc, masses)
    I = core.moment_of_inertia(cc.c, masses)
    return float(I * np.trace(C) / cc.U_value - 2.0)


def lagrange_gamma_product(masses: MassTriple) -> float:
    return 27.0 * core.pairwise_products(masses) / (4.0 * masses.m ** 2)


def is_spiraling(masses: MassTriple, middle: int = 2) -> bool:
    nu = nu_parameter(masses, middle)
    if abs(nu - 0.125) < BOUNDARY_BAND:
        raise BoundaryError(f"nu = {nu!r} is within {BOUNDARY_BAND} of 1/8")
    return nu > 0.125


@dataclass
class SpectralReport:
    cc_kind: CCKind
    v0: float
    at_infinity: bool
    alphas: tuple
    eigenvalues: list
    k: float | None = None
    nu: float | None = None
    spiraling: bool | None = None
    discrepancy: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "cc_kind": self.cc_kind.value,
            "v0": self.v0,
            "at_infinity": self.at_infinity,
            "alphas": [float(a) for a in self.alphas],
            "eigenvalues": [[float(np.real(e)), float(np.imag(e))] for e in self.eigenvalues],
            "k": self.k,
            "nu": self.nu,
            "spiraling": self.spiraling,
        }
        if self.discrepancy is not None:
            d["discrepancy"] = self.discrepancy
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def restpoint_v0(cc: CentralConfiguration, sign: str) -> float:
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return (1.0 if sign == "+" else -1.0) * np.sqrt(2.0 * cc.U_value)


def restpoint_eigenvalues(cc: CentralConfiguration, sign: str, at_infinity: bool,
                          masses: MassTriple) -> SpectralReport:
    """The eight exponents on the tangent space of the phase space at a restpoint.

    The radial direction contributes v (or -v at infinity), the direction dz = s
    another v, the rotation s_perp a zero together with its partner -v/2, and
    each nontrivial alpha a pair from the quadratic lam^2 + v lam/2 - alpha = 0.
    """
    v = restpoint_v0(cc, sign)
    a1, a2 = nontrivial_alphas(cc, masses)
    ev = [complex(-v if at_infinity else v), complex(v), complex(-v / 2), 0j]
    ev += list(lambda_pair(v, a1)) + list(lambda_pair(v, a2))
    rep = SpectralReport(cc.kind, float(v), bool(at_infinity), (a1, a2), ev)
    if cc.kind.is_lagrange:
        rep.k = lagrange_k(masses)
    else:
        rep.nu = nu_parameter(masses, cc.kind.middle)
        rep.spiraling = bool(1 - 8 * rep.nu < 0)
    return rep


def build_variational_matrices(cc: CentralConfiguration, sign: str, at_infinity: bool,
                               masses: MassTriple):
    """(A, B): the 13x13 Jacobian of the blown-up field at the restpoint and the 12x12 block B."""
    from .flow.blowup import jacobian

    v = restpoint_v0(cc, sign)
    s = cc.c
    z = v * s
    A = jacobian(0.0, s, z, masses, chart="u" if at_infinity else "r")
    G = core.hessian_potential(s, masses)
    I6 = np.eye(6)
    B = np.block([[-v * I6, I6], [G, 0.5 * v * I6]])
    return A, B


def constrained_B(cc: CentralConfiguration, sign: str, masses: MassTriple) -> np.ndarray:
    """B in a mass-orthonormal basis of {sum m ds = 0, <s,ds> = 0} for both ds and dz (6x6)."""
    v = restpoint_v0(cc, sign)
    Phi = core.sphere_tangent_basis(cc.c, masses)
    G = core.hessian_potential(cc.c, masses)
    Gr = Phi.T @ (masses.diag()[:, None] * (G @ Phi))
    I3 = np.eye(3)
    return np.block([[-v * I3, I3], [Gr, 0.5 * v * I3]])


def tangent_space_basis(s, masses: MassTriple) -> np.ndarray:
    """13x8 basis of the tangent space to the phase space at (radial, s, z = v s)."""
    Phi = core.sphere_tangent_basis(s, masses)
    E = np.zeros((13, 8))
    E[0, 0] = 1.0
    E[1:7, 1:4] = Phi
    E[7:13, 4] = s
    E[7:13, 5:8] = Phi
    return E


def restricted_A(cc: CentralConfiguration, sign: str, at_infinity: bool,
                 masses: MassTriple) -> np.ndarray:
    A, _ = build_variational_matrices(cc, sign, at_infinity, masses)
    E = tangent_space_basis(cc.c, masses)
    return np.linalg.pinv(E) @ A @ E


def match_multisets(a, b) -> float:
    """Largest distance between optimally paired elements of two complex lists."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("multisets differ in size")
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def numeric_crosscheck(cc: CentralConfiguration, sign: str, at_infinity: bool,
                       masses: MassTriple, report: SpectralReport | None = None) -> float:
    """Discrepancy between closed-form exponents and dense eigensolves (B constrained and A on T_pX)."""
    if report is None:
        report = restpoint_eigenvalues(cc, sign, at_infinity, masses)
    ev = np.array(report.eigenvalues)
    scale = max(1.0, abs(report.v0))
    dB = match_multisets(np.linalg.eigvals(constrained_B(cc, sign, masses)), ev[2:])
    dA = match_multisets(np.linalg.eigvals(restricted_A(cc, sign, at_infinity, masses)), ev)
    return max(dB, dA) / scale


# -- mass simplex scan ------------------------------------------------------

@dataclass(frozen=True)
class MassMapCell:
    masses: tuple
    nu_values: tuple
    spiral_flags: tuple  # True / False / None (indeterminate)

    @property
    def in_spiraling_range(self):
        if any(f is None for f in self.spiral_flags):
            return None
        return all(self.spiral_flags)


def simplex_grid(resolution: int, margin: float = 1e-3):
    """Integer grid (i, j, k), i + j + k = N - 1, row-major in i then j, with m_i >= margin."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    n = resolution - 1
    idx = [(i, j, n - i - j) for i in range(n + 1) for j in range(n + 1 - i)]
    idx = np.array(idx, dtype=int)
    a = idx / n
    keep = np.all(a >= margin, axis=1)
    return idx[keep], a[keep]


def spiraling_region_scan(resolution: int = 200, margin: float = 1e-3):
    idx, a = simplex_grid(resolution, margin)
    if len(a) == 0:
        return []
    nus = np.stack([nu_parameter_batch(a, k) for k in (1, 2, 3)], axis=1)
    flags = nus > 0.125
    indet = np.abs(nus - 0.125) < BOUNDARY_BAND
    cells = []
    for row, nu, fl, ind in zip(a, nus, flags, indet):
        f = tuple(None if d else bool(x) for x, d in zip(fl, ind))
        cells.append(MassMapCell(tuple(float(x) for x in row), tuple(float(x) for x in nu), f))
    return cells


def mass_map_csv(cells) -> str:
    out = io.StringIO()
    out.write("m1,m2,m3,nu1,nu2,nu3,spiral1,spiral2,spiral3,all\n")

    def flag(x):
        return "-1" if x is None else str(int(x))

    for c in cells:
        nums = [f"{x:.17g}" for x in c.masses + c.nu_values]
        out.write(",".join(nums + [flag(f) for f in c.spiral_flags] + [flag(c.in_spiraling_range)]) + "\n")
    return out.getvalue()


def kind_of(cc_or_kind) -> CCKind:
    return cc_or_kind.kind if isinstance(cc_or_kind, CentralConfiguration) else CCKind(cc_or_kind)
