"""Small dense linear-algebra kernel.

Symmetric matrices are carried as plain ``numpy`` arrays; :func:`as_symmetric`
is the validating constructor used at module boundaries.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack

SYMMETRY_TOL = 1e-10
UNIT_TOL = 1e-9
MAX_CONDITION = 1e12
JITTER = 1e-12


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky factorization failed.

    ``pivot`` is the 0-based index of the leading minor that was not positive.
    """

    def __init__(self, pivot: int, msg: str | None = None):
        self.pivot = pivot
        super().__init__(msg or f"matrix is not positive definite (failing pivot {pivot})")


class IllConditionedError(np.linalg.LinAlgError):
    """Block to be eliminated is singular or exceeds the condition guard."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"condition number {condition:.3e} exceeds {MAX_CONDITION:.0e}")


class NormalizationError(ValueError):
    pass


def symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def is_symmetric(M: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    return bool(np.all(np.abs(M - M.T) <= tol * np.maximum(1.0, np.abs(M))))


def as_symmetric(M, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Validate ``M`` as a square symmetric matrix and return an exactly symmetric copy."""
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not is_symmetric(M, tol):
        raise ValueError("matrix is not symmetric")
    return symmetrize(M)


def skew(u) -> np.ndarray:
    """Cross-product matrix of a unit 3-vector: ``skew(u) @ v == np.cross(u, v)``."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {u.shape}")
    norm = np.linalg.norm(u)
    if abs(norm - 1.0) > UNIT_TOL:
        raise NormalizationError(f"vector is not unit norm (|u| = {norm:.12g})")
    return np.array(
        [
            [0.0, -u[2], u[1]],
            [u[2], 0.0, -u[0]],
            [-u[1], u[0], 0.0],
        ]
    )


def cholesky(M: np.ndarray, jitter: bool = False) -> np.ndarray:
    """Lower Cholesky factor of ``M``.

    With ``jitter=True`` a single retry with ``M + 1e-12 I`` is made on failure.
    Raises :class:`NotPositiveDefiniteError` with the failing pivot.
    """
    M = np.asarray(M, dtype=float)
    L, info = lapack.dpotrf(M, lower=1, clean=1)
    if info == 0:
        return L
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    if jitter:
        L, info2 = lapack.dpotrf(M + JITTER * np.eye(M.shape[0]), lower=1, clean=1)
        if info2 == 0:
            return L
        info = info2
    raise NotPositiveDefiniteError(info - 1)


def cholesky_logdet(M: np.ndarray, jitter: bool = False) -> float:
    """``log det M`` from the Cholesky diagonal; no determinant is formed."""
    L = cholesky(M, jitter=jitter)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def batched_logdet(stack: np.ndarray) -> np.ndarray:
    """Log-determinants of a ``(k, d, d)`` stack of PD matrices.

    Each matrix gets its own factorization; the value for a given matrix does not
    depend on what else is in the batch.
    """
    try:
        L = np.linalg.cholesky(stack)
    except np.linalg.LinAlgError:
        return np.array([cholesky_logdet(M, jitter=True) for M in stack])
    return 2.0 * np.sum(np.log(np.diagonal(L, axis1=-2, axis2=-1)), axis=-1)


def spd_inverse(M: np.ndarray, jitter: bool = False) -> np.ndarray:
    L = cholesky(M, jitter=jitter)
    inv, info = lapack.dpotri(L, lower=1)
    if info != 0:
        raise NotPositiveDefiniteError(max(info - 1, 0))
    inv = np.tril(inv) + np.tril(inv, -1).T
    return inv


def schur_complement(A, B, C) -> np.ndarray:
    """``A - B C^{-1} B^T`` for the block matrix ``[[A, B], [B^T, C]]``.

    ``C`` must have condition number below ``1e12``; otherwise
    :class:`IllConditionedError` is raised.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if A.shape[0] != A.shape[1] or C.shape[0] != C.shape[1]:
        raise ValueError("diagonal blocks must be square")
    if B.shape != (A.shape[0], C.shape[0]):
        raise ValueError(f"coupling block has shape {B.shape}, expected {(A.shape[0], C.shape[0])}")
    cond = np.linalg.cond(C)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise IllConditionedError(float(cond))
    return symmetrize(A - B @ np.linalg.solve(C, B.T))


def eig_extremes(M: np.ndarray) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a symmetric matrix."""
    w = np.linalg.eigvalsh(np.asarray(M, dtype=float))
    return float(w[0]), float(w[-1])
