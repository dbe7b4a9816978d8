"""Adaptive integration of the blown-up equations with constraint projection."""
from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import DOP853
from scipy.interpolate import CubicSpline

from .. import core
from ..core import MassTriple
from ..errors import ConstraintBlowup, StepFailure
from .blowup import BlownUpState, jacobian, rhs, time_rate


@dataclass
class IntegratorOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    max_radial: float = 1e12
    min_distance: float = 1e-4  # smallest allowed mutual distance of the normalized s
    project: bool = True
    t0: float = 0.0
    max_steps: int = 200000


@dataclass
class Trajectory:
    """Samples of a blown-up solution, stored with tau increasing.

    `y` rows are (radial, s, z); `t` is Newtonian time from the quadrature of
    dt = r^{3/2} dtau.  For backward runs `forward` is False and the initial
    state is the last sample.
    """

    chart: str
    masses: MassTriple
    h: float
    tau: np.ndarray
    y: np.ndarray
    t: np.ndarray
    tangents: np.ndarray | None = None
    forward: bool = True
    status: str = "completed"
    message: str = ""
    drift: np.ndarray | None = None
    dt: np.ndarray | None = None  # t[i+1] - t[i], accurate even where t itself has lost digits
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.tau)

    @property
    def radial(self):
        return self.y[:, 0]

    @property
    def s(self):
        return self.y[:, 1:7]

    @property
    def z(self):
        return self.y[:, 7:13]

    @property
    def v(self):
        return np.sum(self.s * self.masses.diag() * self.z, axis=1)

    @property
    def r(self):
        if self.chart == "r":
            return self.radial
        with np.errstate(divide="ignore"):
            return 1.0 / self.radial

    def state(self, i) -> BlownUpState:
        return BlownUpState.from_vector(self.chart, self.y[i], self.masses, self.h)

    @property
    def initial(self) -> BlownUpState:
        return self.state(0 if self.forward else -1)

    @property
    def final(self) -> BlownUpState:
        return self.state(-1 if self.forward else 0)

    def retime(self, k: int, t_k: float):
        """Shift Newtonian time so sample k sits at t_k, summing increments outward from k."""
        if self.dt is None:
            self.t = self.t + (t_k - self.t[k])
            return self
        k = k % len(self)
        # partial sums starting at k keep full relative precision near sample k
        after = np.cumsum(self.dt[k:])
        before = -np.cumsum(self.dt[:k][::-1])[::-1]
        self.t = t_k + np.concatenate([before, [0.0], after])
        return self

    def energy_residuals(self):
        zz = np.sum(self.z * self.masses.diag() * self.z, axis=1)
        e = 0.5 * zz - core.potential(self.s, self.masses)
        if self.chart == "r":
            e = e - self.radial * self.h
        return e

    def constraint_residuals(self):
        sph = np.abs(np.sum(self.s * self.masses.diag() * self.s, axis=1) - 1.0)
        com_s = np.max(np.abs(core.center_of_mass_moment(self.s, self.masses)), axis=-1)
        com_z = np.max(np.abs(core.center_of_mass_moment(self.z, self.masses)), axis=-1)
        return np.max(np.stack([sph, com_s, com_z]), axis=0)

    def v_decrements(self):
        """Per-step decrease of v in increasing tau (positive means v fell; v is a Lyapunov function)."""
        return -np.diff(self.v)

    def newtonian(self):
        """(t, q, qdot) at samples with finite, positive r."""
        r = self.r
        ok = np.isfinite(r) & (r > 0)
        q = r[ok, None] * self.s[ok]
        qdot = self.z[ok] / np.sqrt(r[ok, None])
        return self.t[ok], q, qdot

    def interpolant(self):
        return CubicSpline(self.tau, self.y, axis=0)

    def summary(self) -> dict:
        e = self.energy_residuals()
        dec = self.v_decrements()
        return {
            "status": self.status,
            "message": self.message,
            "samples": len(self),
            "tau_range": [float(self.tau[0]), float(self.tau[-1])],
            "max_energy_residual": float(np.max(np.abs(e))),
            "max_constraint_residual": float(np.max(self.constraint_residuals())),
            "v_monotonicity_violations": int(np.sum(dec > 1e-9)),
        }

    def to_csv(self, header: dict | None = None) -> str:
        out = io.StringIO()
        meta = {"masses": list(self.masses), "chart": self.chart, "h": self.h}
        meta.update(self.meta)
        if header:
            meta.update(header)
        out.write("# " + json.dumps(meta, default=_jsonable) + "\n")
        names = [f"{p}{i}{c}" for p in "sz" for i in (1, 2, 3) for c in "xy"]
        out.write(",".join(["tau", "t", "radial", "chart"] + names + ["v", "energy_residual"]) + "\n")
        e = self.energy_residuals()
        v = self.v
        for k in range(len(self)):
            row = [f"{self.tau[k]:.17g}", f"{self.t[k]:.17g}", f"{self.y[k, 0]:.17g}", self.chart]
            row += [f"{x:.17g}" for x in self.y[k, 1:]]
            row += [f"{v[k]:.17g}", f"{e[k]:.17g}"]
            out.write(",".join(row) + "\n")
        return out.getvalue()


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if hasattr(x, "__dataclass_fields__"):
        return asdict(x)
    return str(x)


def _project(y, masses: MassTriple):
    """Center and renormalize s, remove the mass-weighted mean of z.  Returns the drift removed."""
    s = y[1:7]
    z = y[7:13]
    a = masses.array()
    com_s = (a @ s.reshape(3, 2)) / masses.m
    com_z = (a @ z.reshape(3, 2)) / masses.m
    s = (s.reshape(3, 2) - com_s).ravel()
    I = np.dot(s * masses.diag(), s)
    drift = max(abs(I - 1.0), float(np.max(np.abs(com_s))), float(np.max(np.abs(com_z))))
    y = y.copy()
    y[1:7] = s / np.sqrt(I)
    y[7:13] = (z.reshape(3, 2) - com_z).ravel()
    return y, drift


def integrate(initial: BlownUpState, tau_span, opts: IntegratorOptions | None = None,
              tangents=None) -> Trajectory:
    """Integrate from `initial` over tau_span = (tau0, tau1); tau1 < tau0 runs backward.

    Every accepted step is recorded.  The run stops early (status 'stopped')
    when the radial coordinate leaves (0, max_radial] or the normalized
    configuration approaches a binary collision.
    """
    opts = opts or IntegratorOptions()
    masses = initial.masses
    chart = initial.chart
    tau0, tau1 = map(float, tau_span)
    if tau0 == tau1:
        raise ValueError("empty tau span")
    ntan = 0 if tangents is None else len(tangents)
    y0 = np.concatenate([initial.vector(), [opts.t0]])
    if ntan:
        X0 = np.array(tangents, dtype=float).reshape(ntan, 13).T
        y0 = np.concatenate([y0, X0.ravel()])

    def fun(_tau, y):
        out = np.empty_like(y)
        out[:13] = rhs(y[:13], masses, chart)
        # t is meaningless on radial = 0 (collision or infinity); carry it frozen there
        out[13] = time_rate(chart, y[0]) if y[0] > 0 else 0.0
        if ntan:
            J = jacobian(y[0], y[1:7], y[7:13], masses, chart)
            out[14:] = (J @ y[14:].reshape(13, ntan)).ravel()
        return out

    atol = np.full(y0.shape, opts.atol)
    atol[0] = 1e-300  # radial evolves multiplicatively: control it by relative error only
    atol[13] = 1e300  # Newtonian time is slaved to the flow; keep it out of step control
    solver = DOP853(fun, tau0, y0, tau1, rtol=opts.rtol, atol=atol, max_step=opts.max_step)
    taus = [tau0]
    ys = [y0.copy()]
    drifts = [0.0]
    incs = []  # per-step Newtonian time increments, kept separately so small t stay accurate
    y0[13] = 0.0
    solver.y[13] = 0.0
    status, message = "completed", ""
    steps = 0
    while solver.status == "running":
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            raise StepFailure(f"integrator failed at tau={solver.t:.6g}: {msg}")
        y = solver.y.copy()
        incs.append(y[13])
        y[13] = 0.0
        drift = 0.0
        if opts.project:
            y13, drift = _project(y[:13], masses)
            if drift > 1e-6:
                raise ConstraintBlowup(f"constraint drift {drift:.3e} in one step at tau={solver.t:.6g}")
            y[:13] = y13
        solver.y = y
        solver.f = fun(solver.t, y)
        taus.append(solver.t)
        ys.append(y.copy())
        drifts.append(drift)
        radial = y[0]
        if radial <= 0 and not (y0[0] == 0):
            status, message = "stopped", "radial coordinate reached zero"
            break
        if radial > opts.max_radial:
            status, message = "stopped", "radial coordinate exceeded bound"
            break
        if np.min(core.pair_distances(y[1:7])) < opts.min_distance:
            status, message = "stopped", "close approach to a binary collision"
            break
        if steps >= opts.max_steps:
            status, message = "stopped", "maximum number of steps"
            break
    taus = np.array(taus)
    Y = np.array(ys)
    Y[:, 13] = opts.t0 + np.concatenate([[0.0], np.cumsum(incs)])
    drifts = np.array(drifts)
    incs = np.array(incs)
    forward = tau1 > tau0
    if not forward:
        taus, Y, drifts, incs = taus[::-1], Y[::-1], drifts[::-1], -incs[::-1]
    tan = None
    if ntan:
        tan = Y[:, 14:].reshape(len(Y), 13, ntan).transpose(0, 2, 1)
    return Trajectory(chart, masses, initial.h, taus, Y[:, :13].copy(), Y[:, 13].copy(), tan,
                      forward, status, message, drifts, dt=incs)


def integrate_with_variation(initial: BlownUpState, tangent_set, tau_span,
                             opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate the flow together with its linearization applied to each tangent 13-vector."""
    tangent_set = [np.asarray(a, dtype=float) for a in tangent_set]
    return integrate(initial, tau_span, opts, tangents=tangent_set)


def linearized_constraint_residuals(traj: Trajectory) -> np.ndarray:
    """max over tangents of |C(y) . a| for the linearized sphere and center-of-mass constraints."""
    if traj.tangents is None:
        raise ValueError("trajectory carries no tangents")
    res = np.zeros(len(traj))
    a = traj.masses.array()
    Md = traj.masses.diag()
    for k in range(len(traj)):
        s = traj.y[k, 1:7]
        T = traj.tangents[k]  # (ntan, 13)
        ds = T[:, 1:7]
        dz = T[:, 7:13]
        rows = [ds.reshape(-1, 3, 2).transpose(0, 2, 1) @ a, dz.reshape(-1, 3, 2).transpose(0, 2, 1) @ a,
                (ds @ (Md * s))[:, None]]
        res[k] = max(float(np.max(np.abs(r))) for r in rows)
    return res
