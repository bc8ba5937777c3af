"""Geometric phases of mixed two-qubit states in a transverse-field XX model."""

from .closed_form import (
    closed_form_phase,
    gp1_closed,
    gp2_closed_coupled,
    gp2_closed_free,
    lambdas,
    verify_closed_vs_numeric,
)
from .engine import (
    GPResult,
    evolution,
    geometric_phase,
    parallel_transport_correction,
    phase_for,
    scan_singularities,
)
from .model import (
    Family,
    InitialStateSpec,
    SpectralDecomposition,
    SystemParams,
    build_hamiltonian,
    build_initial_state,
    negativity,
    state_eigensystem,
)

__version__ = "0.1.0"
