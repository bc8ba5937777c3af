"""Dense complex linear algebra for small Hermitian problems.

Every generator used in this package is Hermitian, so the matrix exponential
is always taken through the eigendecomposition.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "HERM_TOL",
    "NonHermitianError",
    "as_matrix",
    "check_hermitian",
    "herm_eig",
    "expm_i_hermitian",
    "adjoint",
    "trace",
    "product",
    "compress",
    "embed",
    "is_unitary",
]

HERM_TOL = 1e-12


class NonHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex128 array, rejecting anything else."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def check_hermitian(m, tol: float = HERM_TOL) -> np.ndarray:
    a = as_matrix(m)
    asym = float(np.max(np.abs(a - a.conj().T)))
    scale = 1.0 + float(np.max(np.abs(a)))
    if asym > tol * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian: max |M - M^H| = {asym:.3e} "
            f"exceeds {tol:.1e} * (1 + max|M|) = {tol * scale:.3e}"
        )
    return a


def herm_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    evals : ndarray
        Real eigenvalues in ascending order.
    evecs : ndarray
        Orthonormal eigenvectors stored as columns; ``evecs[:, k]`` belongs
        to ``evals[k]``. Inside a degenerate eigenspace the basis is
        arbitrary.
    """
    a = check_hermitian(m)
    # symmetrize so LAPACK sees an exactly Hermitian input
    evals, evecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    return evals, evecs


def expm_i_hermitian(h, s: float) -> np.ndarray:
    """Return ``exp(i s H)`` for Hermitian ``H``."""
    evals, evecs = herm_eig(h)
    return (evecs * np.exp(1j * s * evals)) @ evecs.conj().T


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def trace(m) -> complex:
    return complex(np.trace(as_matrix(m)))


def product(*ms) -> np.ndarray:
    """Matrix product of one or more square matrices of equal size."""
    if not ms:
        raise ValueError("product of zero matrices")
    mats = [as_matrix(m) for m in ms]
    n = mats[0].shape[0]
    for m in mats[1:]:
        if m.shape != (n, n):
            raise ValueError(f"dimension mismatch: {m.shape} vs {(n, n)}")
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return out


def _basis_columns(vectors, dim: int) -> np.ndarray:
    b = np.asarray(vectors, dtype=complex)
    if b.ndim == 1:
        b = b[:, None]
    if b.ndim != 2 or b.shape[0] != dim:
        raise ValueError(
            f"basis vectors must be columns of length {dim}, got shape {b.shape}"
        )
    return b


def compress(m, vectors) -> np.ndarray:
    """Compression ``B^H M B`` of ``M`` onto the span of the columns of ``B``.

    The entries are ``<b_i|M|b_j>``, i.e. the matrix of ``P M P`` written in
    the orthonormal basis ``B`` of the subspace.
    """
    a = as_matrix(m)
    b = _basis_columns(vectors, a.shape[0])
    return b.conj().T @ a @ b


def embed(block, vectors) -> np.ndarray:
    """Inverse of :func:`compress`: ``B K B^H`` as an operator on the full space."""
    k = as_matrix(block)
    b = np.asarray(vectors, dtype=complex)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[1] != k.shape[0]:
        raise ValueError(f"block of size {k.shape[0]} vs {b.shape[1]} basis vectors")
    return b @ k @ b.conj().T


def is_unitary(m, tol: float = 1e-10) -> bool:
    a = as_matrix(m)
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)
