"""Two-stage M-estimation for left-censored regression with an endogenous
regressor: control-function first stage, pluggable-loss second stage,
sandwich covariance with a first-stage adjustment, plus Monte Carlo and
bootstrap harnesses."""

__version__ = "0.1.0"

from .bootstrap import BootReport, bootstrap_bmse, resample_indices
from .covariance import (
    CovarianceReport,
    beta_covariance,
    default_bandwidth,
    estimate_blocks,
    wald_intervals,
)
from .data import (
    AugmentedDesign,
    Dataset,
    InstrumentVector,
    ParamVector,
    censoring_fraction,
    dataset_from_columns,
)
from .errors import (
    DataError,
    IdentificationError,
    NonFiniteError,
    NumericalError,
    SingularMatrixError,
    TobitmError,
)
from .estimator import MEstimateFit, augment_design, fit, objective, score_norm
from .first_stage import FirstStageFit, first_stage_cov, fit_first_stage
from .losses import (
    LossSpec,
    clad,
    log_cosh,
    loss_from_spec,
    make_loss,
    register_loss,
    smoothed_psi_prime,
    validate_loss,
    wme,
)
from .montecarlo import (
    CoverageReport,
    DgpConfig,
    SimReport,
    child_seed,
    generate,
    run_coverage,
    run_experiment,
    sample_error,
)
from .simplex import OptResult, SimplexConfig, multi_start, nelder_mead

__all__ = [
    "AugmentedDesign", "BootReport", "CovarianceReport", "CoverageReport",
    "DataError", "Dataset", "DgpConfig", "FirstStageFit", "IdentificationError",
    "InstrumentVector", "LossSpec", "MEstimateFit", "NonFiniteError",
    "NumericalError", "OptResult", "ParamVector", "SimReport", "SimplexConfig",
    "SingularMatrixError", "TobitmError", "augment_design", "beta_covariance",
    "bootstrap_bmse", "censoring_fraction", "child_seed", "clad",
    "dataset_from_columns", "default_bandwidth", "estimate_blocks", "fit",
    "first_stage_cov", "fit_first_stage", "generate", "log_cosh",
    "loss_from_spec", "make_loss", "multi_start", "nelder_mead", "objective",
    "register_loss", "resample_indices", "run_coverage", "run_experiment",
    "sample_error", "score_norm", "smoothed_psi_prime", "validate_loss",
    "wald_intervals", "wme",
]
