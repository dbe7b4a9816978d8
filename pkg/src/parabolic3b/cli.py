"""Command line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import errors
from .centralconfig import CCKind, all_central_configurations, by_kind, euler
from .core import MassTriple

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

NUMERIC_ERRORS = (errors.ConvergenceError, errors.StepFailure, errors.ConstraintBlowup,
                  errors.DegenerateSpectrumError, errors.QuadratureError, errors.BoundaryError,
                  errors.CollisionError)


class InputError(Exception):
    pass


def parse_masses(text: str) -> MassTriple:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"masses must be a comma separated triple, got {text!r}") from None
    return MassTriple.from_sequence(vals)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, args):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands --------------------------------------------------------------------

def cmd_cc(args):
    ccs = all_central_configurations(parse_masses(args.masses))
    _emit(_dump({"masses": list(ccs[0].masses), "configurations": [c.to_dict() for c in ccs]}), args)


def cmd_spectra(args):
    from .spectra import numeric_crosscheck, restpoint_eigenvalues

    masses = parse_masses(args.masses)
    try:
        kind = CCKind(args.cc)
    except ValueError:
        raise InputError(f"unknown central configuration {args.cc!r}") from None
    cc = by_kind(masses, kind)
    rep = restpoint_eigenvalues(cc, args.sign, args.infinity, masses)
    rep.discrepancy = numeric_crosscheck(cc, args.sign, args.infinity, masses, rep)
    d = rep.to_dict()
    d["masses"] = list(masses)
    d["sign"] = args.sign
    _emit(_dump(d), args)


def cmd_massmap(args):
    from .spectra import mass_map_csv, spiraling_region_scan

    if args.resolution < 2:
        raise InputError("resolution must be at least 2")
    if not 0 <= args.margin < 1.0 / 3.0:
        raise InputError("margin must lie in [0, 1/3)")
    _emit(mass_map_csv(spiraling_region_scan(args.resolution, args.margin)), args)


def _parse_restpoint(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or parts[1] not in ("infinity", "collision"):
        raise InputError("restpoint is KIND,infinity or KIND,collision (e.g. lagrange+,infinity)")
    try:
        kind = CCKind(parts[0])
    except ValueError:
        raise InputError(f"unknown central configuration {parts[0]!r}") from None
    return kind, parts[1] == "infinity"


def cmd_integrate(args):
    from .flow.blowup import BlownUpState, restpoint
    from .flow.integrator import IntegratorOptions, integrate
    from .flow.manifolds import offset_state, stable_subspace

    masses = parse_masses(args.masses)
    opts = IntegratorOptions(rtol=args.tol_rel, atol=args.tol_abs)
    meta = {}
    if args.state:
        y = np.array(json.loads(args.state), dtype=float)
        if y.shape != (13,):
            raise InputError("state is a JSON list of 13 numbers (radial, s, z)")
        start = BlownUpState.from_vector(args.chart, y, masses, args.energy)
        meta["initial"] = "explicit"
    elif args.restpoint:
        kind, at_inf = _parse_restpoint(args.restpoint)
        cc = by_kind(masses, kind)
        rp = restpoint(cc, args.sign, at_infinity=at_inf, radial=args.radial)
        start = rp.state
        meta.update(restpoint=args.restpoint, sign=args.sign, v0=rp.v0)
        if args.offset:
            if not args.dir.startswith("stable"):
                raise InputError("--dir is stableK, K indexing the stable directions")
            ss = stable_subspace(rp)
            k = int(args.dir[6:] or 0)
            if not 0 <= k < ss.dim:
                raise InputError(f"stable direction index must be below {ss.dim}")
            d = ss.vectors[k]
            if at_inf and k > 0:
                # tilt toward the radial direction so u stays positive
                d = ss.vectors[0] + d
                d /= np.linalg.norm(d)
            start = offset_state(rp, args.offset, d)
            meta.update(offset=args.offset, direction=args.dir,
                        stable_eigenvalue=[float(ss.eigenvalues[k].real), float(ss.eigenvalues[k].imag)])
    else:
        raise InputError("give --state or --restpoint")
    traj = integrate(start, (0.0, args.tau), opts)
    traj.meta.update(meta)
    summary = traj.summary()
    if args.format == "json":
        _emit(_dump({"summary": summary, "meta": traj.meta, "tau": traj.tau.tolist(), "t": traj.t.tolist(),
                     "y": traj.y.tolist()}), args)
    else:
        _emit(traj.to_csv({"summary": summary}), args)
    # the diagnostics summary goes to stderr so stdout stays a clean data stream
    sys.stderr.write(_dump(summary))


def cmd_secondvar(args):
    from .secondvar import conjugate_points, indicial, negative_direction
    from .spectra import is_spiraling, nu_parameter

    masses = parse_masses(args.masses)
    if args.middle not in (1, 2, 3):
        raise InputError("middle must be 1, 2 or 3")
    nu = nu_parameter(masses, args.middle)
    data = indicial(nu)
    out = {"masses": list(masses), "middle": args.middle, "nu": nu, "discriminant": data.discriminant,
           "spiraling": bool(is_spiraling(masses, args.middle))}
    if not out["spiraling"]:
        out["conjugate_points"] = []
        _emit(_dump(out), args)
        return
    cc = euler(masses, args.middle)
    nd = negative_direction(cc, masses, a=args.window_start, N=args.N)
    ratio = float(np.exp(np.pi / data.oscillation_rate))
    out.update({
        "oscillation_rate": data.oscillation_rate,
        "conjugate_ratio": ratio,
        "conjugate_points": conjugate_points(nu, args.window_start, args.window_start * ratio**3 * 1.0001),
        "window": list(nd.window),
        "alpha1": nd.alpha1,
        "z_direction": nd.profile.z_direction.tolist(),
        "Q": nd.Q,
        "quadrature_error": nd.quadrature_error,
        "margin": nd.margin,
        "closed_form_Q": nd.closed_form,
    })
    _emit(_dump(out), args)


def cmd_probe(args):
    from .jmaction import homothetic_path, local_minimizer_probe

    masses = parse_masses(args.masses)
    try:
        cc = by_kind(masses, CCKind(args.cc))
    except ValueError:
        raise InputError(f"unknown central configuration {args.cc!r}") from None
    if not 0 < args.t0 < args.t1:
        raise InputError("need 0 < t0 < t1")
    res = local_minimizer_probe(homothetic_path(cc, args.t0, args.t1, args.nodes), args.modes)
    _emit(_dump({"masses": list(masses), "cc": args.cc, "window": [args.t0, args.t1],
                 "min_eigenvalue": res.min_eigenvalue, "eigenvalues": res.eigenvalues[:8].tolist()}), args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parabolic3b", description="Parabolic motions of three bodies.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--masses", default="1,1,1", help="comma separated triple, e.g. 1,2,3")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--tol-rel", type=float, default=1e-10)
    common.add_argument("--tol-abs", type=float, default=1e-12)
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cc", parents=[common], help="all five central configurations")
    s.set_defaults(func=cmd_cc)

    s = sub.add_parser("spectra", parents=[common], help="restpoint exponents with a numeric cross-check")
    s.add_argument("--cc", default="lagrange+", help="lagrange+, lagrange-, euler1, euler2, euler3")
    s.add_argument("--sign", choices=("+", "-"), default="+")
    s.add_argument("--infinity", action="store_true", help="restpoint at infinity (default: collision)")
    s.set_defaults(func=cmd_spectra)

    s = sub.add_parser("massmap", parents=[common], help="spiraling classification over the mass simplex (CSV)")
    s.add_argument("--resolution", type=int, default=200)
    s.add_argument("--margin", type=float, default=1e-3)
    s.set_defaults(func=cmd_massmap)

    s = sub.add_parser("integrate", parents=[common], help="integrate the blown-up flow")
    s.add_argument("--restpoint", help="KIND,infinity or KIND,collision")
    s.add_argument("--sign", choices=("+", "-"), default="+")
    s.add_argument("--radial", type=float, default=0.0, help="radial coordinate of the start (homothetic runs)")
    s.add_argument("--offset", type=float, default=0.0)
    s.add_argument("--dir", default="stable0", help="stableK: K-th stable direction")
    s.add_argument("--state", help="explicit JSON 13-vector (radial, s, z)")
    s.add_argument("--chart", choices=("r", "u"), default="u")
    s.add_argument("--energy", type=float, default=0.0)
    s.add_argument("--tau", type=float, default=5.0, help="end of the tau span (negative runs backward)")
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("secondvar", parents=[common], help="negative second variation certificate")
    s.add_argument("--middle", type=int, default=2)
    s.add_argument("--window-start", type=float, default=1.0)
    s.add_argument("--N", type=int, default=4096)
    s.set_defaults(func=cmd_secondvar)

    s = sub.add_parser("probe", parents=[common], help="discrete minimality probe on a homothetic segment")
    s.add_argument("--cc", default="lagrange+")
    s.add_argument("--t0", type=float, default=1.0)
    s.add_argument("--t1", type=float, default=4.0)
    s.add_argument("--nodes", type=int, default=64)
    s.add_argument("--modes", type=int, default=8)
    s.set_defaults(func=cmd_probe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        args.func(args)
    except (InputError, errors.InvalidMassError, errors.WindowError, errors.NotSpiralingError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except NUMERIC_ERRORS as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
