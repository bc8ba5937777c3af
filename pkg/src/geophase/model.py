"""Two-qubit XX model in a transverse field and its Werner-like initial states.

Basis order is fixed as ``(|11>, |10>, |01>, |00>)`` with particle 1 written
first and ``|1>`` the ``+1`` eigenstate of ``sigma_z``. Spin operators are
``S = sigma / 2`` with ``hbar = 1``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import check_hermitian, herm_eig

__all__ = [
    "Family",
    "SystemParams",
    "InitialStateSpec",
    "SpectralDecomposition",
    "DEFAULT_GROUP_TOL",
    "build_hamiltonian",
    "interaction_hamiltonian",
    "entangled_vector",
    "build_initial_state",
    "state_eigensystem",
    "partial_transpose",
    "negativity",
]

DEFAULT_GROUP_TOL = 1e-8

# indices into the fixed basis
I11, I10, I01, I00 = range(4)


class Family(str, enum.Enum):
    """Which entangled vector sits on top of the white noise."""

    PHI = "phi"  # sin(theta)|11> + cos(theta)|00>
    PSI = "psi"  # sin(theta)|10> + cos(theta)|01>

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            valid = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown family {value!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class SystemParams:
    """Local field frequencies and XX coupling, in radians per unit time."""

    omega1: float
    omega2: float
    g: float = 0.0

    def __post_init__(self):
        for name in ("omega1", "omega2", "g"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.g < 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g}")

    @classmethod
    def from_ratios(cls, n: float, J: float, omega1: float = 1.0) -> "SystemParams":
        """Build from the inhomogeneity ``n = omega2/omega1`` and ``J = g/omega1``."""
        return cls(omega1=omega1, omega2=n * omega1, g=J * omega1)


@dataclass(frozen=True)
class InitialStateSpec:
    """``rho = (1 - r)/4 I + r |Phi><Phi|`` with ``|Phi>`` picked by ``family``.

    ``theta`` outside ``[0, pi]`` is reduced modulo ``pi`` (the state only
    changes by a global sign of ``|Phi>``), with a warning.
    """

    family: Family
    theta: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        theta = float(self.theta)
        r = float(self.r)
        if not math.isfinite(theta):
            raise ValueError(f"theta must be finite, got {theta}")
        if not math.isfinite(r) or not 0.0 < r <= 1.0:
            raise ValueError(
                f"mixing r must lie in (0, 1], got {r}; r = 0 is the maximally "
                "mixed state whose phase is trivially zero and is excluded"
            )
        if not 0.0 <= theta <= math.pi:
            reduced = math.fmod(theta, math.pi)
            if reduced < 0:
                reduced += math.pi
            warnings.warn(
                f"theta={theta} outside [0, pi]; reduced to {reduced}", stacklevel=3
            )
            theta = reduced
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "r", r)

    @property
    def eigenvalues(self) -> tuple[float, float]:
        """(non-degenerate, triply degenerate) eigenvalues of the state."""
        return (1 + 3 * self.r) / 4, (1 - self.r) / 4


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalue groups of a density matrix, ascending by eigenvalue.

    ``groups[i]`` is ``(eigenvalue, vectors)`` where ``vectors`` holds an
    orthonormal basis of the eigenspace as columns.
    """

    groups: tuple[tuple[float, np.ndarray], ...] = field(default_factory=tuple)

    @property
    def dim(self) -> int:
        return sum(v.shape[1] for _, v in self.groups)

    @property
    def sizes(self) -> list[int]:
        return [v.shape[1] for _, v in self.groups]

    def basis(self) -> np.ndarray:
        return np.hstack([v for _, v in self.groups])

    def reconstruct(self) -> np.ndarray:
        return sum(lam * (v @ v.conj().T) for lam, v in self.groups)


def build_hamiltonian(p: SystemParams) -> np.ndarray:
    """``H = w1 S1z + w2 S2z + g (S1+ S2- + S1- S2+)`` as a 4x4 matrix."""
    wp = (p.omega1 + p.omega2) / 2
    wm = (p.omega1 - p.omega2) / 2
    h = np.diag([wp, wm, -wm, -wp]).astype(complex)
    h[I10, I01] = h[I01, I10] = p.g
    return h


def interaction_hamiltonian(g: float) -> np.ndarray:
    """The flip-flop part ``g (S1+ S2- + S1- S2+)`` alone."""
    return build_hamiltonian(SystemParams(0.0, 0.0, g))


def entangled_vector(family, theta: float) -> np.ndarray:
    family = Family.parse(family)
    v = np.zeros(4, dtype=complex)
    if family is Family.PHI:
        v[I11], v[I00] = math.sin(theta), math.cos(theta)
    else:
        v[I10], v[I01] = math.sin(theta), math.cos(theta)
    return v


def build_initial_state(s: InitialStateSpec) -> np.ndarray:
    v = entangled_vector(s.family, s.theta)
    return (1 - s.r) / 4 * np.eye(4, dtype=complex) + s.r * np.outer(v, v.conj())


def state_eigensystem(rho, group_tol: float = DEFAULT_GROUP_TOL) -> SpectralDecomposition:
    """Group the spectrum of ``rho`` into (numerically) degenerate eigenspaces.

    Adjacent ascending eigenvalues closer than ``group_tol`` are merged; the
    group eigenvalue is their mean.
    """
    rho = check_hermitian(rho)
    tr = np.trace(rho)
    if abs(tr - 1) > 1e-10:
        raise ValueError(f"density matrix must have unit trace, got {tr.real:.12g}")
    evals, evecs = herm_eig(rho)
    if evals[0] < -1e-10:
        raise ValueError(
            f"density matrix has negative eigenvalue {evals[0]:.3e}; not physical"
        )
    groups = []
    start = 0
    for k in range(1, len(evals) + 1):
        if k == len(evals) or evals[k] - evals[k - 1] > group_tol:
            groups.append((float(np.mean(evals[start:k])), evecs[:, start:k]))
            start = k
    return SpectralDecomposition(tuple(groups))


def partial_transpose(rho, particle: int = 2) -> np.ndarray:
    """Partial transpose of a two-qubit operator on ``particle`` (1 or 2)."""
    a = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)  # (i1, i2, j1, j2)
    if particle == 1:
        a = a.transpose(2, 1, 0, 3)
    elif particle == 2:
        a = a.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"particle must be 1 or 2, got {particle}")
    return a.reshape(4, 4)


def negativity(rho, particle: int = 2) -> float:
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose.

    For two qubits this is positive exactly when ``rho`` is entangled.
    """
    rho = check_hermitian(rho)
    mu = np.linalg.eigvalsh(partial_transpose(rho, particle))
    return float(np.sum(np.clip(-mu, 0.0, None)))
