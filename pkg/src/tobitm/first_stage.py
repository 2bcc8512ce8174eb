"""First-stage least squares of the endogenous regressor on the instruments.

Regresses ``w`` on ``z = (z1, X_exo)`` via a rank-revealing SVD solve (no
explicit inverse), producing the coefficient vector, the residuals that
become the control-function column, and the heteroskedasticity-robust
covariance ingredients of the first stage:

    sigma1_delta_hat = (1/n) sum z_i z_i'
    D1_hat           = (1/n) sum e_i^2 z_i z_i'
    omega1_hat       = sigma1_delta_hat^{-1} D1_hat sigma1_delta_hat^{-T}
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, InstrumentVector
from .errors import IdentificationError, SingularMatrixError

# cond(Z'Z) = cond(Z)^2; refuse above 1e12 on the Gram scale.
MAX_GRAM_CONDITION = 1e12


@dataclass(frozen=True)
class FirstStageFit:
    delta_hat: InstrumentVector
    residuals: np.ndarray
    Z: np.ndarray
    sigma1_delta_hat: np.ndarray
    D1_hat: np.ndarray
    omega1_hat: np.ndarray

    @property
    def n(self) -> int:
        return self.Z.shape[0]


def _solve_spd(A: np.ndarray, B: np.ndarray, what: str) -> np.ndarray:
    """Solve A X = B for symmetric positive definite A, refusing ill-conditioned A."""
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] <= 0 or s[-1] <= 0 or s[0] / s[-1] > MAX_GRAM_CONDITION:
        raise SingularMatrixError(
            f"{what} is numerically singular (smallest singular value {s[-1]:.3e})"
        )
    return np.linalg.solve(A, B)


def fit_first_stage(ds: Dataset) -> FirstStageFit:
    """Least-squares fit of w on (z1, X_exo) with covariance ingredients."""
    Z = ds.instrument_matrix()
    n, k = Z.shape

    s = np.linalg.svd(Z, compute_uv=False)
    rank = int(np.sum(s > s[0] * max(n, k) * np.finfo(np.float64).eps))
    if rank < k or (s[0] / s[-1]) ** 2 > MAX_GRAM_CONDITION:
        raise IdentificationError(
            "instrument matrix is rank deficient or ill-conditioned: the "
            "instrument must carry variation not explained by the exogenous "
            f"columns (rank {rank} of {k}, cond {s[0] / s[-1]:.3e})"
        )

    delta, *_ = np.linalg.lstsq(Z, ds.w, rcond=None)
    residuals = ds.w - Z @ delta

    sigma1 = (Z.T @ Z) / n
    D1 = (Z.T * residuals**2) @ Z / n
    omega1 = first_stage_omega(sigma1, D1)

    return FirstStageFit(
        delta_hat=InstrumentVector(delta),
        residuals=residuals,
        Z=Z,
        sigma1_delta_hat=sigma1,
        D1_hat=D1,
        omega1_hat=omega1,
    )


def first_stage_omega(sigma1: np.ndarray, D1: np.ndarray) -> np.ndarray:
    """omega1 = sigma1^{-1} D1 sigma1^{-T}, symmetrized against roundoff."""
    inner = _solve_spd(sigma1, D1, "first-stage Gram matrix")
    omega1 = _solve_spd(sigma1, inner.T, "first-stage Gram matrix").T
    return 0.5 * (omega1 + omega1.T)


def first_stage_cov(fit: FirstStageFit) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The (sigma1_delta_hat, D1_hat, omega1_hat) triple of the fit."""
    return fit.sigma1_delta_hat, fit.D1_hat, fit.omega1_hat
