"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 I/O error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .closed_form import verify_closed_vs_numeric
from .engine import DEFAULT_SING_TOL, GPResult, scan_singularities
from .model import Family, InitialStateSpec, SystemParams, build_initial_state, negativity
from .sweep import (
    AXIS_NAMES,
    DEFAULT_FIXED,
    FIGURES,
    Axis,
    SweepConfig,
    evaluate_point,
    make_record,
    figure_config,
    format_records,
    load_config,
    parse_number,
    parse_values,
    run_sweep,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 2, 3, 4

VERIFY_TOL = 1e-9


class UsageError(Exception):
    pass


def _number(text):
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _family(text):
    try:
        return Family.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_point_args(p, required_time=False):
    p.add_argument("--theta", type=_number, help="entanglement angle [rad] (default pi/4)")
    p.add_argument("--r", type=_number, help="mixing, in (0, 1] (default 1)")
    p.add_argument("--n", type=_number, help="field inhomogeneity omega2/omega1 (default 1)")
    p.add_argument("--J", type=_number, help="rescaled coupling g/omega1 (default 0)")
    p.add_argument("--omega1t", type=_number, required=required_time,
                   help="dimensionless evolution time omega1*t")
    p.add_argument("--omega1", type=_number, default=None, help="reference frequency (default 1)")
    p.add_argument("--sing-tol", type=_number, default=None,
                   help=f"singularity threshold on |Tr| (default {DEFAULT_SING_TOL:g})")


def _add_output_args(p):
    p.add_argument("--format", choices=("csv", "jsonl"), default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geophase",
        description="Geometric phases of mixed two-qubit states in the XX model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate a single parameter point")
    p.add_argument("--family", type=_family, required=True, help="phi or psi")
    _add_point_args(p, required_time=True)

    p = sub.add_parser("sweep", help="evaluate a grid of up to two axes")
    p.add_argument("--config", help="key-value file describing the sweep")
    p.add_argument("--family", type=_family)
    p.add_argument("--axis", action="append", default=[],
                   help="name:min:max:steps or name=v1,v2,... (repeat for a second axis)")
    _add_point_args(p)
    _add_output_args(p)

    p = sub.add_parser("figure", help="reproduce the data behind a figure")
    p.add_argument("id", choices=list(FIGURES), metavar="ID",
                   help="one of: " + ", ".join(FIGURES))
    _add_output_args(p)

    p = sub.add_parser("scan-singular", help="list grid points where the phase is undefined")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--thetas", default="0:pi:101", help="min:max:steps or v1,v2,...")
    p.add_argument("--rs", default="0.01:1:100")
    p.add_argument("--omega1ts", default="pi/2", help="evolution times omega1*t")
    p.add_argument("--n", type=_number, default=1.0)
    p.add_argument("--J", type=_number, default=0.0)
    p.add_argument("--omega1", type=_number, default=1.0)
    p.add_argument("--sing-tol", type=_number, default=DEFAULT_SING_TOL)
    _add_output_args(p)

    p = sub.add_parser("verify", help="compare closed forms with the numeric engine")
    p.add_argument("--points", type=int, default=16,
                   help="number of theta samples on [0, pi] (>= 2)")
    p.add_argument("--family", type=_family, action="append",
                   help="restrict to one family (repeatable; default both)")
    p.add_argument("--thetas", help="override the theta grid")
    p.add_argument("--rs", default="0.1:1:10")
    p.add_argument("--ns", default="0,0.5,1,2")
    p.add_argument("--Js", default="0,0.3,1,5")
    p.add_argument("--omega1ts", default="pi/3:2*pi:6")
    p.add_argument("--tol", type=_number, default=VERIFY_TOL)
    p.add_argument("--sing-tol", type=_number, default=DEFAULT_SING_TOL)
    return parser


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _pick(value, default):
    return default if value is None else value


def _fixed_from_args(args) -> dict:
    return {k: getattr(args, k) for k in AXIS_NAMES if getattr(args, k, None) is not None}


def cmd_compute(args) -> int:
    fixed = dict(DEFAULT_FIXED)
    fixed.update(_fixed_from_args(args))
    rec = evaluate_point(
        args.family, fixed["theta"], fixed["r"], fixed["n"], fixed["J"], fixed["omega1t"],
        omega1=_pick(args.omega1, 1.0),
        sing_tol=_pick(args.sing_tol, DEFAULT_SING_TOL),
    )
    phase = "undefined" if rec.phase is None else f"{rec.phase:.12g}"
    print(f"family:          {rec.family}")
    print(f"theta:           {rec.theta:.12g}")
    print(f"r:               {rec.r:.12g}")
    print(f"omega1:          {rec.omega1:.12g}")
    print(f"omega2:          {rec.omega2:.12g}")
    print(f"g:               {rec.g:.12g}")
    print(f"t:               {rec.t:.12g}")
    print(f"phase:           {phase}")
    print(f"trace_magnitude: {rec.trace_magnitude:.12g}")
    print(f"singular:        {'true' if rec.singular else 'false'}")
    print(f"negativity:      {rec.negativity:.12g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    io_opts = {}
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise OSError(f"cannot read {args.config}: {exc.strerror or exc}") from exc
        cfg, io_opts = load_config(text)
        # command-line values take precedence over the file
        fixed = dict(cfg.fixed)
        fixed.update(_fixed_from_args(args))
        axes = tuple(Axis.parse(a) for a in args.axis) or cfg.axes
        cfg = SweepConfig(
            family=args.family or cfg.family,
            axes=axes,
            fixed={k: v for k, v in fixed.items() if k not in {a.name for a in axes}},
            omega1=_pick(args.omega1, cfg.omega1),
            sing_tol=_pick(args.sing_tol, cfg.sing_tol),
        )
    else:
        if args.family is None:
            raise UsageError("sweep needs --family or --config")
        if not args.axis:
            raise UsageError("sweep needs at least one --axis (or --config)")
        cfg = SweepConfig(
            family=args.family,
            axes=tuple(Axis.parse(a) for a in args.axis),
            fixed=_fixed_from_args(args),
            omega1=_pick(args.omega1, 1.0),
            sing_tol=_pick(args.sing_tol, DEFAULT_SING_TOL),
        )
    fmt = args.format or io_opts.get("format", "csv")
    out = args.out or io_opts.get("out")
    _emit(format_records(run_sweep(cfg), fmt, cfg.metadata()), out)
    return EXIT_OK


def cmd_figure(args) -> int:
    cfg = figure_config(args.id)
    _emit(format_records(run_sweep(cfg), args.format or "csv", cfg.metadata()), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    params = SystemParams.from_ratios(args.n, args.J, args.omega1)
    times = [wt / args.omega1 for wt in parse_values(args.omega1ts)]
    hits = scan_singularities(
        args.family, parse_values(args.thetas), parse_values(args.rs),
        params, times, args.sing_tol,
    )
    records = []
    for h in hits:
        spec = InitialStateSpec(args.family, h.theta, h.r)
        res = GPResult(None, h.trace_magnitude, True)
        records.append(make_record(
            spec, params, args.n, args.J, h.t * args.omega1, h.t, res,
            negativity(build_initial_state(spec)),
        ))
    meta = [
        f"family: {args.family.value}",
        f"singular points: {len(records)}",
        f"sing_tol: {args.sing_tol:g}",
    ]
    _emit(format_records(records, args.format or "csv", meta), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.points < 2:
        raise UsageError(f"--points must be >= 2, got {args.points}")
    thetas = parse_values(args.thetas) if args.thetas else np.linspace(0, math.pi, args.points)
    families = args.family or (Family.PHI, Family.PSI)
    report = verify_closed_vs_numeric(
        thetas, parse_values(args.rs), parse_values(args.ns), parse_values(args.Js),
        parse_values(args.omega1ts), families=families, sing_tol=args.sing_tol,
    )
    print(report.summary(args.tol))
    return EXIT_OK if report.passed(args.tol) else EXIT_VERIFY


COMMANDS = {
    "compute": cmd_compute,
    "sweep": cmd_sweep,
    "figure": cmd_figure,
    "scan-singular": cmd_scan,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); not an error for us
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"geophase {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"geophase {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
