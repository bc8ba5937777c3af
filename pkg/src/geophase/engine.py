"""Geometric phase of a (possibly degenerate) mixed state under unitary evolution.

The phase is ``Arg Tr[U(t) V(t) rho(0)]`` where ``V(t)`` undoes the dynamical
phase blockwise over the eigenspaces of ``rho(0)``: on every eigenspace the
correction is ``exp(i t P H P)``, and there are no cross terms between
different eigenspaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Iterable, Sequence

import numpy as np

from .linalg import as_matrix, check_hermitian, compress, embed, expm_i_hermitian
from .model import (
    DEFAULT_GROUP_TOL,
    InitialStateSpec,
    SpectralDecomposition,
    SystemParams,
    build_hamiltonian,
    build_initial_state,
    state_eigensystem,
)

__all__ = [
    "DEFAULT_SING_TOL",
    "GPResult",
    "evolution",
    "parallel_transport_correction",
    "parallel_transport_operator",
    "trace_functional",
    "geometric_phase",
    "phase_for",
    "SingularPoint",
    "scan_singularities",
    "circle_distance",
]

DEFAULT_SING_TOL = 1e-9


@dataclass(frozen=True)
class GPResult:
    """Outcome of a phase evaluation.

    ``phase`` is ``None`` exactly when the point is singular, i.e. when the
    interference visibility ``trace_magnitude`` drops below the threshold.
    """

    phase: float | None
    trace_magnitude: float
    singular: bool

    @classmethod
    def from_complex(cls, z: complex, sing_tol: float = DEFAULT_SING_TOL) -> "GPResult":
        mag = abs(z)
        if mag < sing_tol:
            return cls(None, mag, True)
        return cls(principal_angle(z.imag, z.real), mag, False)


def principal_angle(y: float, x: float) -> float:
    """Two-argument angle mapped into ``(-pi, pi]``."""
    a = math.atan2(y, x)
    # atan2 returns -pi for (-0.0, negative x)
    return math.pi if a == -math.pi else a


def circle_distance(a: float, b: float) -> float:
    """Smallest angular separation between two phases."""
    d = math.remainder(a - b, 2 * math.pi)
    return abs(d)


def evolution(h, t: float) -> np.ndarray:
    """``U(t) = exp(-i H t)``."""
    return expm_i_hermitian(h, -t)


def parallel_transport_correction(dec: SpectralDecomposition, h, t: float) -> np.ndarray:
    """Block-diagonal correction ``V(t)`` in the eigenbasis of ``rho(0)``.

    Each eigenspace with projector ``P`` contributes ``exp(i t P H P)``
    restricted to that eigenspace. For a one-dimensional eigenspace this is
    the phase ``exp(i <k|H|k> t)``.
    """
    h = check_hermitian(h)
    if dec.dim != h.shape[0]:
        raise ValueError(
            f"decomposition spans {dec.dim} dimensions but H is {h.shape[0]}x{h.shape[0]}"
        )
    v = np.zeros_like(h)
    for _, vecs in dec.groups:
        block = compress(h, vecs)
        if block.shape[0] == 1:
            v += np.exp(1j * t * block[0, 0].real) * np.outer(vecs[:, 0], vecs[:, 0].conj())
        else:
            v += embed(expm_i_hermitian(block, t), vecs)
    return v


def parallel_transport_operator(dec: SpectralDecomposition, h, t: float) -> np.ndarray:
    return evolution(h, t) @ parallel_transport_correction(dec, h, t)


def trace_functional(rho0, h, t: float, dec: SpectralDecomposition | None = None) -> complex:
    """``Tr[U(t) V(t) rho(0)]``."""
    rho0 = as_matrix(rho0)
    if dec is None:
        dec = state_eigensystem(rho0, DEFAULT_GROUP_TOL)
    u_par = parallel_transport_operator(dec, h, t)
    return complex(np.trace(u_par @ rho0))


def geometric_phase(
    rho0,
    h,
    t: float,
    sing_tol: float = DEFAULT_SING_TOL,
    dec: SpectralDecomposition | None = None,
) -> GPResult:
    """Mixed-state geometric phase of ``rho0`` evolved for time ``t`` under ``h``.

    Parameters
    ----------
    rho0 : array_like
        Initial density matrix.
    h : array_like
        Time-independent Hermitian Hamiltonian.
    t : float
        Final time, ``t >= 0``.
    sing_tol : float
        Points with ``|Tr[U V rho0]| < sing_tol`` are reported as singular.
    dec : SpectralDecomposition, optional
        Precomputed eigenspace grouping of ``rho0``. Any orthonormal basis
        inside each group gives the same result.
    """
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"evolution time must be finite and >= 0, got {t}")
    if not sing_tol > 0:
        raise ValueError(f"sing_tol must be positive, got {sing_tol}")
    return GPResult.from_complex(trace_functional(rho0, h, t, dec), sing_tol)


def phase_for(
    spec: InitialStateSpec,
    params: SystemParams,
    t: float,
    sing_tol: float = DEFAULT_SING_TOL,
) -> GPResult:
    """Convenience wrapper: build the state and Hamiltonian, then evaluate."""
    return geometric_phase(
        build_initial_state(spec), build_hamiltonian(params), t, sing_tol
    )


@dataclass(frozen=True)
class SingularPoint:
    theta: float
    r: float
    t: float
    trace_magnitude: float


def scan_singularities(
    family,
    thetas: Iterable[float],
    rs: Iterable[float],
    params: SystemParams,
    times: Sequence[float],
    sing_tol: float = DEFAULT_SING_TOL,
) -> list[SingularPoint]:
    """Grid points ``(theta, r, t)`` where the phase is undefined, weakest first."""
    times = list(times)
    h = build_hamiltonian(params)
    hits = []
    for theta, r in cartesian(list(thetas), list(rs)):
        rho = build_initial_state(InitialStateSpec(family, theta, r))
        dec = state_eigensystem(rho)
        for t in times:
            res = geometric_phase(rho, h, t, sing_tol, dec)
            if res.singular:
                hits.append(SingularPoint(theta, r, t, res.trace_magnitude))
    hits.sort(key=lambda p: p.trace_magnitude)
    return hits
