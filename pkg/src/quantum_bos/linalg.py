"""Validation helpers for 4x4 density matrices."""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def is_square(matrix: np.ndarray) -> bool:
    return matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1]


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """Entry-wise check that ``matrix`` equals its conjugate transpose."""
    if not is_square(matrix):
        return False
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol)


def has_unit_trace(matrix: np.ndarray, tol: float = TRACE_TOL) -> bool:
    return bool(abs(np.trace(matrix) - 1.0) <= tol)


def is_psd(matrix: np.ndarray, tol: float = PSD_TOL) -> bool:
    """Check positive semidefiniteness of a Hermitian matrix by diagonalizing.

    Eigenvalues down to ``-tol`` are accepted as rounding noise.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if not is_hermitian(matrix):
        return False
    eigenvalues = np.linalg.eigvalsh(matrix)
    return bool(eigenvalues.min() >= -tol)


def is_density_matrix(matrix: np.ndarray) -> bool:
    return (
        is_square(matrix)
        and is_hermitian(matrix)
        and has_unit_trace(matrix)
        and is_psd(matrix)
    )
