"""Dense complex linear algebra: LU with partial pivoting and norms."""

from __future__ import annotations

import numpy as np

from polycont import _engine

PIVOT_RTOL = _engine.PIVOT_RTOL


class SingularMatrix(np.linalg.LinAlgError):
    """A pivot fell below the relative threshold."""


def _square(A) -> np.ndarray:
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def lu_factor(A):
    """Return ``(LU, piv)`` with L unit-lower and U upper packed in one array.

    ``piv[j]`` is the row swapped with row ``j`` at elimination step ``j``.
    """
    LU = _square(A)
    n = LU.shape[0]
    piv = np.empty(n, dtype=np.int64)
    if not _engine.lu_factor_checked(LU, piv, np.empty(n)):
        raise SingularMatrix("matrix is singular to working precision")
    return LU, piv


def permutation_matrix(piv) -> np.ndarray:
    """P such that P @ A == L @ U for the pivots returned by lu_factor."""
    n = len(piv)
    perm = np.arange(n)
    for j, p in enumerate(piv):
        perm[[j, p]] = perm[[p, j]]
    return np.eye(n)[perm]


def lu_solve(A, b) -> np.ndarray:
    A = _square(A)
    b = np.array(b, dtype=complex)
    if b.shape != (A.shape[0],):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({A.shape[0]},)")
    n = A.shape[0]
    ok = _engine.solve_into(A, b, np.empty_like(A), np.empty(n, dtype=np.int64), np.empty(n))
    if not ok:
        raise SingularMatrix("matrix is singular to working precision")
    return b


def inf_norm(v) -> float:
    v = np.asarray(v, dtype=complex).ravel()
    return float(_engine.inf_norm(v))
