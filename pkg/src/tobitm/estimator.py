"""Second-stage M-estimation on the control-function-augmented design.

The estimator minimizes

    Q_n(beta) = (1/n) sum_i rho( (y_i - c) - max(0, xhat_i' beta) )

over beta = (alpha, gamma, rho1), where xhat_i = (x_exo_i, w_i, e_i) stacks
the exogenous columns, the endogenous regressor, and the first-stage
residual.  A non-zero censoring threshold is handled by shifting the
response internally and fitting at zero; the reported intercept is mapped
back to the original scale.

Minimization is multi-start Nelder-Mead.  Default starts are the
least-squares fit ignoring censoring, the least-squares fit on the
uncensored subsample, and the zero vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .data import AugmentedDesign, Dataset, ParamVector
from .errors import IdentificationError, NonFiniteError
from .first_stage import FirstStageFit, fit_first_stage
from .losses import LossSpec
from .simplex import OptResult, SimplexConfig, multi_start


@dataclass(frozen=True)
class MEstimateFit:
    """A fitted two-stage M-estimate.

    ``beta_hat`` is reported on the original response scale (for a non-zero
    threshold the intercept includes the shift back).  ``objective_value``
    is the minimized Q_n, re-evaluable exactly via :meth:`objective_at`.
    The design, shifted response, and loss are retained for covariance
    estimation and diagnostics.
    """

    beta_hat: ParamVector
    objective_value: float
    first_stage: FirstStageFit
    loss: LossSpec
    score_norm: float
    opt: OptResult
    n: int
    p: int
    design: AugmentedDesign
    y_shifted: np.ndarray
    c: float

    @property
    def beta_internal(self) -> np.ndarray:
        """Parameter vector in shifted (threshold-zero) coordinates."""
        beta = self.beta_hat.to_array()
        beta[0] -= self.c
        return beta

    def objective_at(self, beta: ParamVector) -> float:
        """Q_n at a model-space parameter vector."""
        b = _beta_array(beta).copy()
        b[0] -= self.c
        return objective(b, self.design, self.y_shifted, 0.0, self.loss)

    def residuals(self) -> np.ndarray:
        """eps_hat_i = (y_i - c) - xhat_i' beta_hat (no censoring max)."""
        return self.y_shifted - self.design.Xhat @ self.beta_internal


def augment_design(ds: Dataset, fs: FirstStageFit) -> AugmentedDesign:
    """Rows (x_exo_i, w_i, e_i); column order fixed as exogenous, endogenous, residual."""
    if fs.residuals.shape[0] != ds.n:
        raise IdentificationError("first-stage fit does not match the dataset")
    return AugmentedDesign(np.column_stack([ds.X_exo, ds.w, fs.residuals]), p=ds.p)


def _beta_array(beta) -> np.ndarray:
    if isinstance(beta, ParamVector):
        return beta.to_array()
    return np.asarray(beta, dtype=np.float64).ravel()


def objective(beta, X: AugmentedDesign, y, c: float, loss: LossSpec) -> float:
    """Q_n(beta) = mean rho((y - c) - max(0, Xhat beta)).

    ``beta`` is in shifted (threshold-zero) coordinates; with c = 0 the two
    coordinate systems coincide.
    """
    b = _beta_array(beta)
    Xhat = X.Xhat
    if b.size != Xhat.shape[1]:
        raise IdentificationError(
            f"parameter length {b.size} does not match design width {Xhat.shape[1]}"
        )
    xb = Xhat @ b
    if not np.isfinite(xb).all():
        raise NonFiniteError("non-finite linear predictor in objective")
    u = (np.asarray(y, dtype=np.float64) - c) - np.maximum(xb, 0.0)
    return float(np.mean(loss.rho(u)))


def _make_objective(Xhat: np.ndarray, y_shift: np.ndarray, loss: LossSpec):
    rho = loss.rho

    def q(beta: np.ndarray) -> float:
        xb = Xhat @ beta
        u = y_shift - np.maximum(xb, 0.0)
        return float(np.mean(rho(u)))

    return q


def default_starts(Xhat: np.ndarray, y_shift: np.ndarray) -> list[np.ndarray]:
    """LS ignoring censoring, LS on the uncensored subsample, zero vector."""
    k = Xhat.shape[1]
    ls_all, *_ = np.linalg.lstsq(Xhat, y_shift, rcond=None)
    unc = y_shift > 0
    ls_unc, *_ = np.linalg.lstsq(Xhat[unc], y_shift[unc], rcond=None)
    return [ls_all, ls_unc, np.zeros(k)]


def score_vector(Xhat: np.ndarray, y_shift: np.ndarray, beta: np.ndarray,
                 loss: LossSpec) -> np.ndarray:
    """Empirical score -(1/n) sum 1(xhat'beta > 0) psi(y' - xhat'beta) xhat_i."""
    xb = Xhat @ beta
    active = xb > 0.0
    weights = np.where(active, loss.psi(y_shift - xb), 0.0)
    return -(weights @ Xhat) / Xhat.shape[0]


def score_norm(fit: MEstimateFit) -> float:
    """Euclidean norm of the empirical score at the fitted parameters.

    Near-zero values indicate the fit sits at a stationary point of the
    smooth part of the objective; the asymptotics require the scaled score
    to vanish, so this is the standard convergence diagnostic.
    """
    s = score_vector(fit.design.Xhat, fit.y_shifted, fit.beta_internal, fit.loss)
    return float(np.linalg.norm(s))


def fit(ds: Dataset, loss: LossSpec, cfg: Optional[SimplexConfig] = None,
        starts: Optional[Sequence[np.ndarray]] = None) -> MEstimateFit:
    """Run both stages and minimize Q_n by multi-start Nelder-Mead."""
    cfg = cfg or SimplexConfig()

    n_uncensored = int(np.count_nonzero(ds.y > ds.c))
    if n_uncensored == 0:
        raise IdentificationError("all observations are censored; beta is unidentified")
    if n_uncensored < 2:
        raise IdentificationError(
            "only one uncensored observation; beta is unidentified"
        )

    fs = fit_first_stage(ds)
    design = augment_design(ds, fs)
    y_shift = ds.y - ds.c

    q = _make_objective(design.Xhat, y_shift, loss)
    start_points = list(starts) if starts is not None else default_starts(design.Xhat, y_shift)
    opt = multi_start(q, start_points, cfg)

    beta_internal = opt.x_min
    beta_model = beta_internal.copy()
    beta_model[0] += ds.c
    beta_hat = ParamVector.from_array(beta_model)

    s = score_vector(design.Xhat, y_shift, beta_internal, loss)

    return MEstimateFit(
        beta_hat=beta_hat,
        objective_value=opt.f_min,
        first_stage=fs,
        loss=loss,
        score_norm=float(np.linalg.norm(s)),
        opt=opt,
        n=ds.n,
        p=ds.p,
        design=design,
        y_shifted=y_shift,
        c=ds.c,
    )
