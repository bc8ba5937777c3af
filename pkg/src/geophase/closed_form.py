r"""Analytic phases for the Werner-like states and their check against the engine.

All three formulas share one structure. With a shift angle ``a``, a rotation
angle ``b`` and a weight ``k``,

.. math::

    N &= -r\,(\sin a \cos b - k \cos a \sin b) \\
    D &= \tfrac{1-r}{2} + \tfrac{1+r}{2}(\cos a \cos b + k \sin a \sin b)

and the phase is ``atan2(N, D)``; ``N`` and ``D`` are exactly the imaginary
and real parts of ``Tr[U V rho(0)]``.

* ``phi`` family, any ``g``: ``b = (w1 + w2) t / 2``, ``k = cos 2theta``,
  ``a = k b``. The flip-flop coupling commutes with these states and drops
  out.
* ``psi`` family, ``g = 0``: same with ``w1 - w2``.
* ``psi`` family, ``g > 0``: diagonalizing the ``{|10>, |01>}`` block gives
  ``a = lambda1 t``, ``b = lambda2 t`` and ``k = lambda1 / lambda2`` with

  .. math::

      \lambda_1 = [(w_1 - w_2)\cos 2\theta - 2 g \sin 2\theta] / 2, \quad
      \lambda_2 = \sqrt{(w_1 - w_2)^2 + 4 g^2} / 2.

  The commonly quoted form of this result writes ``sin(lambda1 t)`` in the
  second slot and ``lambda2/lambda1`` as the weight; that version does not
  reduce to the ``g = 0`` result and disagrees with the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterable

import numpy as np

from .engine import DEFAULT_SING_TOL, GPResult, circle_distance, geometric_phase
from .model import (
    Family,
    InitialStateSpec,
    SystemParams,
    build_hamiltonian,
    build_initial_state,
    state_eigensystem,
)

__all__ = [
    "LambdaPair",
    "lambdas",
    "gp1_closed",
    "gp2_closed_free",
    "gp2_closed_coupled",
    "closed_form_phase",
    "VerificationReport",
    "verify_closed_vs_numeric",
]


@dataclass(frozen=True)
class LambdaPair:
    lambda1: float
    lambda2: float


def lambdas(p: SystemParams, theta: float) -> LambdaPair:
    d = p.omega1 - p.omega2
    lam1 = (d * math.cos(2 * theta) - 2 * p.g * math.sin(2 * theta)) / 2
    lam2 = math.hypot(d, 2 * p.g) / 2
    return LambdaPair(lam1, lam2)


def _result(r, a, cos_b, sin_b, k_sin_b, sing_tol) -> GPResult:
    num = -r * (math.sin(a) * cos_b - math.cos(a) * k_sin_b)
    den = (1 - r) / 2 + (1 + r) / 2 * (math.cos(a) * cos_b + math.sin(a) * k_sin_b)
    return GPResult.from_complex(complex(den, num), sing_tol)


def _free(freq: float, theta: float, r: float, t: float, sing_tol: float) -> GPResult:
    b = freq * t / 2
    k = math.cos(2 * theta)
    return _result(r, k * b, math.cos(b), math.sin(b), k * math.sin(b), sing_tol)


def _require_free(p: SystemParams):
    if p.g != 0:
        raise ValueError(f"this closed form holds only for g = 0, got g = {p.g}")


def gp1_closed(
    p: SystemParams, theta: float, r: float, t: float, sing_tol: float = DEFAULT_SING_TOL
) -> GPResult:
    """Phase of the ``phi``-family state without coupling."""
    _require_free(p)
    return _free(p.omega1 + p.omega2, theta, r, t, sing_tol)


def gp2_closed_free(
    p: SystemParams, theta: float, r: float, t: float, sing_tol: float = DEFAULT_SING_TOL
) -> GPResult:
    """Phase of the ``psi``-family state without coupling."""
    _require_free(p)
    return _free(p.omega1 - p.omega2, theta, r, t, sing_tol)


def gp2_closed_coupled(
    p: SystemParams, theta: float, r: float, t: float, sing_tol: float = DEFAULT_SING_TOL
) -> GPResult:
    """Phase of the ``psi``-family state for any coupling ``g >= 0``.

    ``(lambda1/lambda2) sin(lambda2 t)`` is evaluated as
    ``lambda1 t sinc(lambda2 t)``, which is the continuous extension at
    ``lambda2 = 0`` (homogeneous field, no coupling), where the phase is 0.
    """
    lam = lambdas(p, theta)
    a = lam.lambda1 * t
    b = lam.lambda2 * t
    k_sin_b = a * float(np.sinc(b / math.pi))
    return _result(r, a, math.cos(b), math.sin(b), k_sin_b, sing_tol)


def closed_form_phase(
    spec: InitialStateSpec, p: SystemParams, t: float, sing_tol: float = DEFAULT_SING_TOL
) -> GPResult:
    """Dispatch to the analytic phase for ``spec.family``.

    The ``phi`` family ignores ``g`` since the coupling commutes with the state.
    """
    if spec.family is Family.PHI:
        return _free(p.omega1 + p.omega2, spec.theta, spec.r, t, sing_tol)
    return gp2_closed_coupled(p, spec.theta, spec.r, t, sing_tol)


@dataclass
class VerificationReport:
    max_deviation: float = 0.0
    location: dict | None = None
    compared: int = 0
    singular_skipped: int = 0
    singular_locations: list[dict] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        """True when every grid point was singular, so nothing was compared."""
        return self.compared == 0

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_deviation < tol

    def summary(self, tol: float = 1e-9) -> str:
        lines = [
            f"compared points:   {self.compared}",
            f"singular skipped:  {self.singular_skipped}",
            f"max deviation:     {self.max_deviation:.3e}",
        ]
        if self.location is not None:
            loc = ", ".join(f"{k}={v:.12g}" if isinstance(v, float) else f"{k}={v}"
                            for k, v in self.location.items())
            lines.append(f"at:                {loc}")
        if self.empty:
            lines.append("WARNING: no defined points were compared")
        verdict = "PASS" if self.passed(tol) else "FAIL"
        cmp = "<" if self.passed(tol) else ">="
        lines.append(f"max deviation {cmp} {tol:g}, {verdict}")
        return "\n".join(lines)


def verify_closed_vs_numeric(
    thetas: Iterable[float],
    rs: Iterable[float],
    ns: Iterable[float],
    Js: Iterable[float],
    omega1_ts: Iterable[float],
    families: Iterable = (Family.PHI, Family.PSI),
    omega1: float = 1.0,
    sing_tol: float = DEFAULT_SING_TOL,
) -> VerificationReport:
    """Compare the analytic phases with the engine over a full Cartesian grid.

    Points where either route finds ``|Tr| < sing_tol`` are counted as
    singular and excluded from the deviation statistics. Deviations are
    measured on the circle.
    """
    thetas, rs = list(thetas), list(rs)
    ns, Js, omega1_ts = list(ns), list(Js), list(omega1_ts)
    report = VerificationReport()
    hams = {}
    for n, J in cartesian(ns, Js):
        p = SystemParams.from_ratios(n, J, omega1)
        hams[n, J] = (p, build_hamiltonian(p))
    for fam in families:
        fam = Family.parse(fam)
        for theta, r in cartesian(thetas, rs):
            spec = InitialStateSpec(fam, theta, r)
            rho = build_initial_state(spec)
            dec = state_eigensystem(rho)
            for (n, J), (p, h) in hams.items():
                for wt in omega1_ts:
                    t = wt / omega1
                    num = geometric_phase(rho, h, t, sing_tol, dec)
                    ana = closed_form_phase(spec, p, t, sing_tol)
                    loc = dict(family=fam.value, theta=theta, r=r, n=n, J=J, omega1t=wt)
                    if num.singular or ana.singular:
                        report.singular_skipped += 1
                        report.singular_locations.append(loc)
                        continue
                    report.compared += 1
                    dev = circle_distance(num.phase, ana.phase)
                    if report.location is None or dev > report.max_deviation:
                        report.max_deviation = dev
                        report.location = loc
    return report
