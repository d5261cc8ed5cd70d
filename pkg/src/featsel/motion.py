"""Stacked prediction-horizon prior from a linear motion model.

State is the 3D robot position. Over the horizon ``t..t+M`` the stacked state
has dimension ``3(M+1)``; all stacked indices are 0-based offsets from ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve

from featsel.numerics import NotPositiveDefiniteError, as_symmetric, cholesky, symmetrize


@dataclass(frozen=True)
class MotionModel:
    """``x_k = A x_{k-1} + B u_k + noise``, noise ~ N(0, Lambda)."""

    A: np.ndarray
    B: np.ndarray
    Lambda: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if A.shape != (3, 3):
            raise ValueError(f"A must be 3x3, got {A.shape}")
        if B.ndim != 2 or B.shape[0] != 3:
            raise ValueError(f"B must be 3xm, got {B.shape}")
        Lam = as_symmetric(self.Lambda)
        if Lam.shape != (3, 3):
            raise ValueError(f"Lambda must be 3x3, got {Lam.shape}")
        cholesky(Lam)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "Lambda", Lam)

    @property
    def input_dim(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class HorizonPrior:
    M: int
    mu: np.ndarray
    Sigma: np.ndarray
    Hbar: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 3 * (self.M + 1)

    def block(self, i: int, j: int) -> np.ndarray:
        return self.Sigma[3 * i : 3 * i + 3, 3 * j : 3 * j + 3]


def propagate_prior(model: MotionModel, mu0, Sigma0, controls, M: int) -> HorizonPrior:
    """Mean, covariance and information matrix of the stacked horizon state.

    Diagonal blocks follow ``S_k = A S_{k-1} A^T + Lambda``; the cross block
    between offsets ``i < j`` is ``cov(x_j, x_i) = A^(j-i) S_i`` (stored at
    ``(j, i)``, with its transpose at ``(i, j)``). Controls move only the mean.
    """
    if M < 0:
        raise ValueError("horizon length must be non-negative")
    mu0 = np.asarray(mu0, dtype=float).reshape(3)
    Sigma0 = as_symmetric(Sigma0)
    if Sigma0.shape != (3, 3):
        raise ValueError(f"Sigma0 must be 3x3, got {Sigma0.shape}")
    try:
        cholesky(Sigma0)
    except NotPositiveDefiniteError as exc:
        raise ValueError("Sigma0 is not positive definite") from exc
    controls = np.asarray(controls, dtype=float).reshape(-1, model.input_dim) if M else np.zeros((0, model.input_dim))
    if controls.shape[0] != M:
        raise ValueError(f"expected {M} controls, got {controls.shape[0]}")

    A = model.A
    d = 3 * (M + 1)
    mu = np.zeros(d)
    Sigma = np.zeros((d, d))

    means = [mu0]
    diag = [Sigma0]
    for k in range(1, M + 1):
        means.append(A @ means[-1] + model.B @ controls[k - 1])
        diag.append(symmetrize(A @ diag[-1] @ A.T + model.Lambda))

    for i in range(M + 1):
        mu[3 * i : 3 * i + 3] = means[i]
        Sigma[3 * i : 3 * i + 3, 3 * i : 3 * i + 3] = diag[i]
        cross = diag[i]
        for j in range(i + 1, M + 1):
            cross = A @ cross
            Sigma[3 * j : 3 * j + 3, 3 * i : 3 * i + 3] = cross
            Sigma[3 * i : 3 * i + 3, 3 * j : 3 * j + 3] = cross.T

    Sigma = symmetrize(Sigma)
    L = cholesky(Sigma, jitter=True)
    Hbar = symmetrize(cho_solve((L, True), np.eye(d)))
    return HorizonPrior(M=M, mu=mu, Sigma=Sigma, Hbar=Hbar)
