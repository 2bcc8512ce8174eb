"""Exception hierarchy shared across the package.

Two broad failure classes matter for callers (and for CLI exit codes):
user/data problems (bad input files, invalid column roles, malformed
datasets) and numerical failures discovered during estimation (rank
deficiency, singular covariance blocks, non-finite objectives).
"""


class TobitmError(Exception):
    """Base class for all package-specific errors."""


class DataError(TobitmError, ValueError):
    """Invalid user input: malformed dataset, CSV, or column roles."""


class NumericalError(TobitmError, RuntimeError):
    """Estimation failed for numerical reasons."""


class IdentificationError(NumericalError):
    """The model is not identified on this sample.

    Raised for rank-deficient instrument matrices (instrument collinear
    with the exogenous columns) and for datasets with too few uncensored
    observations to pin down the regression parameters.
    """


class SingularMatrixError(NumericalError):
    """A matrix that must be inverted is numerically singular."""


class NonFiniteError(NumericalError):
    """A non-finite value appeared where a finite one is required."""
