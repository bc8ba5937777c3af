"""Parameter grids, figure presets and tabular output.

A sweep has at most two axes drawn from ``theta``, ``r``, ``n``, ``J`` and
``omega1t``. Records are produced in row-major order over ``(axis1, axis2)``:
the second axis varies fastest. Frequencies are derived from the reference
``omega1`` as ``omega2 = n omega1``, ``g = J omega1``, ``t = omega1t / omega1``.
"""

from __future__ import annotations

import ast
import configparser
import csv
import operator
import io
import json
import math
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterable, Sequence

import numpy as np

from .engine import DEFAULT_SING_TOL, GPResult, geometric_phase
from .model import (
    Family,
    InitialStateSpec,
    SystemParams,
    build_hamiltonian,
    build_initial_state,
    negativity,
    state_eigensystem,
)

__all__ = [
    "AXIS_NAMES",
    "FIELDS",
    "parse_number",
    "parse_values",
    "DEFAULT_FIXED",
    "Axis",
    "SweepConfig",
    "SweepRecord",
    "make_record",
    "evaluate_point",
    "iter_grid",
    "run_sweep",
    "format_records",
    "write_records",
    "read_csv_records",
    "load_config",
    "FIGURES",
    "figure_config",
]

AXIS_NAMES = ("theta", "r", "n", "J", "omega1t")

FIELDS = (
    "family", "theta", "r", "omega1", "omega2", "g", "t", "n", "J", "omega1t",
    "phase", "trace_magnitude", "singular", "negativity",
)

DEFAULT_FIXED = {"theta": math.pi / 4, "r": 1.0, "n": 1.0, "J": 0.0, "omega1t": math.pi}

FORMATS = ("csv", "jsonl")


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub,
           ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text) -> float:
    """Parse a float, allowing ``pi`` and basic arithmetic (``3*pi/4``)."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"not a number: {text!r}")

    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"not a number: {text!r}") from None
    return ev(tree.body)


def parse_values(text: str) -> list[float]:
    """``min:max:steps`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad range {text!r}; use min:max:steps")
        lo, hi, steps = parse_number(parts[0]), parse_number(parts[1]), int(parts[2])
        if steps < 1:
            raise ValueError(f"range {text!r}: steps must be >= 1")
        return list(np.linspace(lo, hi, steps))
    return [parse_number(v) for v in text.split(",") if v.strip()]


def fmt_num(x: float) -> str:
    """Twelve significant digits; enough to check 1e-9 tolerances from files."""
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise ValueError(f"axis {self.name} needs at least 2 points")
        object.__setattr__(self, "values", vals)

    @classmethod
    def linspace(cls, name: str, lo: float, hi: float, steps: int) -> "Axis":
        steps = int(steps)
        if steps < 2:
            raise ValueError(f"axis {name}: steps must be >= 2, got {steps}")
        if not lo < hi:
            raise ValueError(f"axis {name}: need min < max, got {lo} >= {hi}")
        return cls(name, tuple(np.linspace(lo, hi, steps)))

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``name:min:max:steps`` or ``name=v1,v2,...``."""
        text = text.strip()
        if "=" in text:
            name, vals = text.split("=", 1)
            return cls(name.strip(), tuple(parse_number(v) for v in vals.split(",") if v.strip()))
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(
                f"bad axis {text!r}; use name:min:max:steps or name=v1,v2,..."
            )
        name, lo, hi, steps = parts
        return cls.linspace(name.strip(), parse_number(lo), parse_number(hi), int(steps))

    def describe(self) -> str:
        v = self.values
        diffs = np.diff(v)
        if len(v) > 2 and np.allclose(diffs, diffs[0], rtol=1e-9, atol=1e-15):
            return f"{self.name}:{fmt_num(v[0])}:{fmt_num(v[-1])}:{len(v)}"
        return f"{self.name}=" + ",".join(fmt_num(x) for x in v)


@dataclass(frozen=True)
class SweepConfig:
    family: Family
    axes: tuple[Axis, ...] = ()
    fixed: dict = field(default_factory=dict)
    omega1: float = 1.0
    sing_tol: float = DEFAULT_SING_TOL

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        axes = tuple(self.axes)
        if len(axes) > 2:
            raise ValueError(f"at most 2 swept axes, got {len(axes)}")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ValueError(f"axis listed twice: {names}")
        object.__setattr__(self, "axes", axes)
        fixed = dict(DEFAULT_FIXED)
        for k, v in dict(self.fixed).items():
            if k not in AXIS_NAMES:
                raise ValueError(f"unknown parameter {k!r}")
            if v is not None:
                fixed[k] = float(v)
        for k in names:
            fixed.pop(k, None)
        object.__setattr__(self, "fixed", fixed)
        if not (math.isfinite(self.omega1) and self.omega1 > 0):
            raise ValueError(f"omega1 must be positive, got {self.omega1}")
        if not self.sing_tol > 0:
            raise ValueError(f"sing_tol must be positive, got {self.sing_tol}")
        # validate every value the grid can take
        for name in AXIS_NAMES:
            vals = self.axis(name).values if name in names else (fixed[name],)
            for v in vals:
                _check_param(name, v)

    def axis(self, name: str) -> Axis:
        for a in self.axes:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def size(self) -> int:
        return math.prod(len(a.values) for a in self.axes)

    def metadata(self) -> list[str]:
        lines = [f"family: {self.family.value}"]
        for i, a in enumerate(self.axes, 1):
            lines.append(f"axis{i}: {a.describe()}")
        for k in AXIS_NAMES:
            if k in self.fixed:
                lines.append(f"{k}: {fmt_num(self.fixed[k])}")
        lines.append(f"omega1: {fmt_num(self.omega1)}")
        lines.append(f"sing_tol: {self.sing_tol:g}")
        return lines


def _check_param(name: str, v: float):
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite, got {v}")
    if name == "r" and not 0 < v <= 1:
        raise ValueError(f"r must lie in (0, 1], got {v}; r = 0 is excluded")
    if name in ("n", "J") and v < 0:
        raise ValueError(f"{name} must be >= 0, got {v}")
    if name == "omega1t" and v < 0:
        raise ValueError(f"omega1t must be >= 0 (no backward evolution), got {v}")


@dataclass(frozen=True)
class SweepRecord:
    family: str
    theta: float
    r: float
    omega1: float
    omega2: float
    g: float
    t: float
    n: float
    J: float
    omega1t: float
    phase: float | None
    trace_magnitude: float
    singular: bool
    negativity: float

    def as_row(self) -> list[str]:
        out = []
        for name in FIELDS:
            v = getattr(self, name)
            if name == "family":
                out.append(v)
            elif name == "singular":
                out.append("true" if v else "false")
            elif v is None:
                out.append("")
            else:
                out.append(fmt_num(v))
        return out

    def as_json(self) -> str:
        d = {}
        for name, s in zip(FIELDS, self.as_row()):
            if name == "family":
                d[name] = s
            elif name == "singular":
                d[name] = self.singular
            else:
                # round-trip through the 12-digit text so both formats agree
                d[name] = None if s == "" else float(s)
        return json.dumps(d)


def evaluate_point(
    family,
    theta: float,
    r: float,
    n: float,
    J: float,
    omega1t: float,
    omega1: float = 1.0,
    sing_tol: float = DEFAULT_SING_TOL,
) -> SweepRecord:
    for name, v in (("r", r), ("n", n), ("J", J), ("omega1t", omega1t)):
        _check_param(name, v)
    spec = InitialStateSpec(family, theta, r)
    p = SystemParams.from_ratios(n, J, omega1)
    t = omega1t / omega1
    rho = build_initial_state(spec)
    res = geometric_phase(rho, build_hamiltonian(p), t, sing_tol)
    return make_record(spec, p, n, J, omega1t, t, res, negativity(rho))


def make_record(spec, p, n, J, omega1t, t, res: GPResult, neg: float) -> SweepRecord:
    return SweepRecord(
        family=spec.family.value, theta=spec.theta, r=spec.r,
        omega1=p.omega1, omega2=p.omega2, g=p.g, t=t, n=n, J=J, omega1t=omega1t,
        phase=res.phase, trace_magnitude=res.trace_magnitude,
        singular=res.singular, negativity=neg,
    )


def iter_grid(cfg: SweepConfig) -> Iterable[dict]:
    """Parameter dicts in row-major order over the configured axes."""
    names = [a.name for a in cfg.axes]
    for combo in cartesian(*(a.values for a in cfg.axes)):
        point = dict(cfg.fixed)
        point.update(zip(names, combo))
        yield point


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Evaluate every grid point of ``cfg``; states and Hamiltonians are cached."""
    states: dict = {}
    hams: dict = {}
    out = []
    for pt in iter_grid(cfg):
        skey = (pt["theta"], pt["r"])
        if skey not in states:
            spec = InitialStateSpec(cfg.family, *skey)
            rho = build_initial_state(spec)
            states[skey] = (spec, rho, state_eigensystem(rho), negativity(rho))
        spec, rho, dec, neg = states[skey]
        hkey = (pt["n"], pt["J"])
        if hkey not in hams:
            p = SystemParams.from_ratios(pt["n"], pt["J"], cfg.omega1)
            hams[hkey] = (p, build_hamiltonian(p))
        p, h = hams[hkey]
        t = pt["omega1t"] / cfg.omega1
        res = geometric_phase(rho, h, t, cfg.sing_tol, dec)
        out.append(make_record(spec, p, pt["n"], pt["J"], pt["omega1t"], t, res, neg))
    return out


def format_records(
    records: Sequence[SweepRecord], fmt: str = "csv", metadata: Sequence[str] = ()
) -> str:
    """Serialize records.

    CSV output starts with ``# key: value`` metadata lines followed by a single
    header row. JSON-lines output puts metadata in a leading ``{"meta": ...}``
    object when there is any.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    buf = io.StringIO()
    if fmt == "csv":
        for line in metadata:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIELDS)
        for rec in records:
            w.writerow(rec.as_row())
    else:
        if metadata:
            meta = dict(line.split(": ", 1) for line in metadata)
            buf.write(json.dumps({"meta": meta}) + "\n")
        for rec in records:
            buf.write(rec.as_json() + "\n")
    return buf.getvalue()


def write_records(path, records, fmt="csv", metadata=()):
    text = format_records(records, fmt, metadata)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_csv_records(text: str) -> list[dict]:
    """Parse CSV sweep output back into dicts of floats (``None`` for blanks)."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = []
    for row in csv.DictReader(lines):
        d = {}
        for k, v in row.items():
            if k == "family":
                d[k] = v
            elif k == "singular":
                d[k] = v == "true"
            else:
                d[k] = None if v == "" else float(v)
        rows.append(d)
    return rows


def load_config(text: str) -> tuple[SweepConfig, dict]:
    """Read a key-value sweep description.

    Recognized keys: ``family``, ``axis1``, ``axis2`` (axis syntax as in
    :meth:`Axis.parse`), ``theta``, ``r``, ``n``, ``J``, ``omega1t``,
    ``omega1``, ``sing_tol``, plus the output options ``format`` and ``out``
    which are returned separately. Lines starting with ``#`` are comments.
    """
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string("[sweep]\n" + text)
    kv = dict(cp["sweep"])
    known = {"family", "axis1", "axis2", "omega1", "sing_tol", "format", "out", *AXIS_NAMES}
    unknown = set(kv) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    axes = tuple(Axis.parse(kv[k]) for k in ("axis1", "axis2") if k in kv)
    fixed = {k: parse_number(kv[k]) for k in AXIS_NAMES if k in kv}
    cfg = SweepConfig(
        family=kv.get("family", "phi"),
        axes=axes,
        fixed=fixed,
        omega1=parse_number(kv.get("omega1", 1.0)),
        sing_tol=parse_number(kv.get("sing_tol", DEFAULT_SING_TOL)),
    )
    return cfg, {k: kv[k] for k in ("format", "out") if k in kv}


PI = math.pi

# Axis extents beyond the figure captions are choices: r starts at 0.01
# (r = 0 is excluded), theta covers [0, pi] for surfaces and [0, pi/2] for
# line scans, J covers [0, 3] (fig3-5) and [0, 100] (fig6). The "n -> 0"
# curve of fig4 is taken as n = 0.001.
_R = Axis.linspace("r", 0.01, 1.0, 100)
_THETA_SURF = Axis.linspace("theta", 0.0, PI, 101)
_THETA_LINE = Axis.linspace("theta", 0.0, PI / 2, 201)
_J3 = Axis.linspace("J", 0.0, 3.0, 61)
_J_FINE = Axis.linspace("J", 0.0, 3.0, 601)
_J_LARGE = Axis.linspace("J", 0.0, 100.0, 1001)
_N_PHI = Axis("n", (0.99, 0.9, 0.5, 0.0))
_N_PSI = Axis("n", (0.5, 0.1, 0.01))

FIGURES: dict[str, SweepConfig] = {
    "fig1a": SweepConfig("phi", (_THETA_SURF, _R), {"n": 1.0, "J": 0.0, "omega1t": PI / 2}),
    "fig1b": SweepConfig("psi", (_THETA_SURF, _R), {"n": 0.5, "J": 0.0, "omega1t": PI}),
    "fig2a": SweepConfig("phi", (_N_PHI, _THETA_LINE), {"r": 1.0, "J": 0.0, "omega1t": PI / 2}),
    "fig2b": SweepConfig("psi", (_N_PSI, _THETA_LINE), {"r": 1.0, "J": 0.0, "omega1t": PI}),
    "fig2c": SweepConfig("phi", (_N_PHI, _THETA_LINE), {"r": 1.0, "J": 0.0, "omega1t": PI / 4}),
    "fig2d": SweepConfig("psi", (_N_PSI, _THETA_LINE), {"r": 1.0, "J": 0.0, "omega1t": PI / 2}),
    "fig3a": SweepConfig("psi", (_R, _J3), {"theta": PI / 4, "n": 0.5, "omega1t": PI}),
    "fig3b": SweepConfig("psi", (_R, _J3), {"theta": 3 * PI / 4, "n": 0.5, "omega1t": PI}),
    "fig4": SweepConfig(
        "psi", (Axis("n", (0.001, 0.1, 0.5, 0.8)), _J_FINE),
        {"theta": PI / 4, "r": 1.0, "omega1t": PI},
    ),
    "fig5a": SweepConfig("psi", (_R, _J3), {"theta": PI / 4, "n": 0.0, "omega1t": PI}),
    "fig5b": SweepConfig("psi", (_R, _J3), {"theta": 3 * PI / 4, "n": 0.0, "omega1t": PI}),
    "fig6a": SweepConfig("psi", (_J_LARGE,), {"theta": PI / 4, "r": 1.0, "n": 0.5, "omega1t": PI}),
    "fig6b": SweepConfig(
        "psi", (_J_LARGE,), {"theta": 3 * PI / 4, "r": 1.0, "n": 0.5, "omega1t": PI}
    ),
}


def figure_config(fig_id: str) -> SweepConfig:
    try:
        return FIGURES[fig_id]
    except KeyError:
        raise ValueError(
            f"unknown figure {fig_id!r}; valid ids: {', '.join(FIGURES)}"
        ) from None
