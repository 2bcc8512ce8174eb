"""Sandwich covariance of the two-stage estimator.

The asymptotic covariance of the second-stage parameters is

    (1/n) * S2b^{-1} { D2 + S2d Omega1 S2d' } (S2b^{-1})'

where S2b and D2 are the usual M-estimation bread and meat on the
augmented design, S2d is the cross-stage Jacobian block (carrying a factor
rho1_hat), and Omega1 is the first-stage sandwich.  The S2d term is the
price of estimating the first stage: dropping it understates the variance
whenever the control-function coefficient is nonzero.

The joint covariance of (beta, delta) is always assembled from the block
matrices and its beta block cross-checked against the direct expression;
a disagreement indicates a numerical problem and is raised, not ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import DataError, NumericalError, SingularMatrixError
from .estimator import MEstimateFit
from .losses import effective_psi_prime

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class CovarianceReport:
    beta_hat: np.ndarray
    sigma2_beta_hat: np.ndarray
    sigma2_delta_hat: np.ndarray
    D2_hat: np.ndarray
    omega1_hat: np.ndarray
    beta_cov: np.ndarray
    adjustment: np.ndarray
    joint_cov: np.ndarray
    se: np.ndarray
    bandwidth_h: float

    @property
    def beta_cov_unadjusted(self) -> np.ndarray:
        """Sandwich without the first-stage term (naive M-estimation variance)."""
        return self.beta_cov - self.adjustment

    def se_unadjusted(self) -> np.ndarray:
        d = np.diag(self.beta_cov_unadjusted).copy()
        return np.sqrt(np.maximum(d, 0.0))


def default_bandwidth(fit: MEstimateFit) -> float:
    """Rule-of-thumb bandwidth 1.06 * sd(eps_hat) * n^(-1/5) for psi' smoothing."""
    eps = fit.residuals()
    sd = float(np.std(eps))
    if sd == 0.0:
        sd = 1.0
    return 1.06 * sd * fit.n ** (-0.2)


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def estimate_blocks(fit: MEstimateFit, h: float | None = None):
    """Plug-in estimates of (sigma2_beta, sigma2_delta, D2).

    All three are censoring-indicator-weighted sums over observations with
    a positive fitted index.  ``psi_prime`` is replaced by its
    central-difference surrogate at bandwidth ``h`` when the loss has no
    classical second derivative.
    """
    if h is None:
        h = default_bandwidth(fit)
    Xhat = fit.design.Xhat
    n = fit.n
    xb = Xhat @ fit.beta_internal
    active = xb > 0.0
    eps = fit.y_shifted - xb

    pp = effective_psi_prime(fit.loss, h)
    w_pp = np.where(active, pp(eps), 0.0)
    w_psi2 = np.where(active, fit.loss.psi(eps) ** 2, 0.0)

    Xw = Xhat * w_pp[:, None]
    sigma2_beta = _sym(Xw.T @ Xhat / n)
    sigma2_delta = fit.beta_hat.rho1 * (Xw.T @ fit.first_stage.Z) / n
    D2 = _sym((Xhat * w_psi2[:, None]).T @ Xhat / n)
    return sigma2_beta, sigma2_delta, D2


def _solve_checked(A: np.ndarray, B: np.ndarray, what: str) -> np.ndarray:
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= 0 or s[0] / s[-1] > MAX_CONDITION:
        raise SingularMatrixError(
            f"{what} is numerically singular (smallest singular value "
            f"{s[-1]:.3e}); identification or censoring is too severe"
        )
    return np.linalg.solve(A, B)


def beta_covariance(fit: MEstimateFit, blocks=None, omega1_hat: np.ndarray | None = None,
                    h: float | None = None) -> CovarianceReport:
    """Assemble the full covariance report for a fitted model."""
    if h is None:
        h = default_bandwidth(fit)
    if blocks is None:
        blocks = estimate_blocks(fit, h)
    sigma2_beta, sigma2_delta, D2 = blocks
    if omega1_hat is None:
        omega1_hat = fit.first_stage.omega1_hat

    n = fit.n
    adj_inner = _sym(sigma2_delta @ omega1_hat @ sigma2_delta.T)
    meat = D2 + adj_inner

    half = _solve_checked(sigma2_beta, meat, "sigma2_beta")
    beta_cov = _sym(_solve_checked(sigma2_beta, half.T, "sigma2_beta").T) / n

    half_adj = _solve_checked(sigma2_beta, adj_inner, "sigma2_beta")
    adjustment = _sym(_solve_checked(sigma2_beta, half_adj.T, "sigma2_beta").T) / n

    # Joint (beta, delta) covariance: block triangular bread, block diagonal meat.
    k2 = sigma2_beta.shape[0]
    k1 = omega1_hat.shape[0]
    sigma1 = fit.first_stage.sigma1_delta_hat
    D1 = fit.first_stage.D1_hat
    Sigma = np.zeros((k2 + k1, k2 + k1))
    Sigma[:k2, :k2] = sigma2_beta
    Sigma[:k2, k2:] = sigma2_delta
    Sigma[k2:, k2:] = sigma1
    Dmat = np.zeros_like(Sigma)
    Dmat[:k2, :k2] = D2
    Dmat[k2:, k2:] = D1
    inner = _solve_checked(Sigma, Dmat, "joint block matrix")
    joint_cov = _solve_checked(Sigma, inner.T, "joint block matrix").T / n

    block = joint_cov[:k2, :k2]
    scale = max(1.0, float(np.abs(beta_cov).max()))
    if np.abs(block - beta_cov).max() > 1e-8 * scale:
        raise NumericalError(
            "joint-covariance beta block disagrees with the direct sandwich "
            f"expression (max abs diff {np.abs(block - beta_cov).max():.3e})"
        )

    diag = np.diag(beta_cov).copy()
    tol = 1e-8 * max(1.0, float(np.trace(beta_cov)))
    if (diag < -tol).any():
        raise NumericalError("beta covariance has a negative variance beyond tolerance")
    se = np.sqrt(np.maximum(diag, 0.0))

    return CovarianceReport(
        beta_hat=fit.beta_hat.to_array(),
        sigma2_beta_hat=sigma2_beta,
        sigma2_delta_hat=sigma2_delta,
        D2_hat=D2,
        omega1_hat=omega1_hat,
        beta_cov=beta_cov,
        adjustment=adjustment,
        joint_cov=joint_cov,
        se=se,
        bandwidth_h=float(h),
    )


def wald_intervals(report: CovarianceReport, level: float = 0.95) -> np.ndarray:
    """Per-parameter (lo, hi) normal-quantile intervals, shape (p+2, 2)."""
    if not 0.0 < level < 1.0:
        raise DataError(f"confidence level must be in (0, 1), got {level}")
    q = norm.ppf(0.5 + level / 2.0)
    lo = report.beta_hat - q * report.se
    hi = report.beta_hat + q * report.se
    return np.column_stack([lo, hi])
