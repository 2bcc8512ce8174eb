"""Core observational and parameter containers.

A :class:`Dataset` holds one censored-regression sample: the observed
response ``y`` (left-censored at a fixed threshold ``c``), the exogenous
design ``X_exo`` whose first column is an intercept, the single endogenous
regressor ``w``, and the single instrument ``z1``.  Censored observations
are stored *exactly equal* to ``c``; equality, not a tolerance, is what
defines censoring throughout the package.

All containers are frozen dataclasses wrapping read-only numpy arrays, so
they can be shared freely across threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


def _first_bad_index(mask: np.ndarray) -> int:
    return int(np.argmax(mask))


@dataclass(frozen=True)
class Dataset:
    """One censored sample with a single endogenous regressor.

    Attributes
    ----------
    y : (n,) observed responses, every entry >= c
    X_exo : (n, p) exogenous design, column 0 identically one
    w : (n,) endogenous regressor
    z1 : (n,) instrument for ``w``
    c : censoring threshold (responses are left-censored at ``c``)
    """

    y: np.ndarray
    X_exo: np.ndarray
    w: np.ndarray
    z1: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        y = _readonly(np.atleast_1d(self.y))
        X = _readonly(np.atleast_2d(self.X_exo))
        w = _readonly(np.atleast_1d(self.w))
        z1 = _readonly(np.atleast_1d(self.z1))
        c = float(self.c)

        n = y.shape[0]
        if n < 1:
            raise DataError("dataset must contain at least one row")
        if X.shape[0] != n or w.shape[0] != n or z1.shape[0] != n:
            raise DataError(
                f"column length mismatch: y has {n} rows, X_exo {X.shape[0]}, "
                f"w {w.shape[0]}, z1 {z1.shape[0]}"
            )
        for name, col in (("y", y), ("w", w), ("z1", z1)):
            bad = ~np.isfinite(col)
            if bad.any():
                raise DataError(f"non-finite value in {name} at row {_first_bad_index(bad)}")
        bad = ~np.isfinite(X).all(axis=1)
        if bad.any():
            raise DataError(f"non-finite value in X_exo at row {_first_bad_index(bad)}")
        if not np.isfinite(c):
            raise DataError("censoring threshold c must be finite")
        if not (X[:, 0] == 1.0).all():
            raise DataError("first column of X_exo must be identically 1 (intercept)")
        below = y < c
        if below.any():
            raise DataError(f"response below threshold at row {_first_bad_index(below)}")

        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X_exo", X)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        """Number of exogenous columns, intercept included."""
        return self.X_exo.shape[1]

    def instrument_matrix(self) -> np.ndarray:
        """n x (p+1) matrix with rows (z1_i, x_exo_i)."""
        return np.column_stack([self.z1, self.X_exo])

    def equals(self, other: "Dataset") -> bool:
        return (
            self.c == other.c
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.X_exo, other.X_exo)
            and np.array_equal(self.w, other.w)
            and np.array_equal(self.z1, other.z1)
        )


@dataclass(frozen=True)
class ParamVector:
    """Second-stage parameters: exogenous coefficients, endogenous
    coefficient, and the control-function coefficient, in that order."""

    alpha: np.ndarray
    gamma: float
    rho1: float

    def __post_init__(self):
        alpha = _readonly(np.atleast_1d(self.alpha))
        if not np.isfinite(alpha).all():
            raise DataError("non-finite entry in alpha")
        if not (np.isfinite(self.gamma) and np.isfinite(self.rho1)):
            raise DataError("gamma and rho1 must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "rho1", float(self.rho1))

    @classmethod
    def from_array(cls, beta: np.ndarray) -> "ParamVector":
        beta = np.asarray(beta, dtype=np.float64)
        if beta.ndim != 1 or beta.size < 3:
            raise DataError("parameter vector must be 1-d with length >= 3")
        return cls(alpha=beta[:-2], gamma=beta[-2], rho1=beta[-1])

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.alpha, [self.gamma, self.rho1]])

    def __len__(self) -> int:
        return self.alpha.size + 2


@dataclass(frozen=True)
class InstrumentVector:
    """First-stage coefficients, ordered (instrument, exogenous columns)."""

    delta: np.ndarray

    def __post_init__(self):
        delta = _readonly(np.atleast_1d(self.delta))
        if not np.isfinite(delta).all():
            raise DataError("non-finite entry in delta")
        object.__setattr__(self, "delta", delta)

    def __len__(self) -> int:
        return self.delta.size


@dataclass(frozen=True)
class AugmentedDesign:
    """Second-stage design: rows (x_exo_i, w_i, e_i), shape n x (p+2)."""

    Xhat: np.ndarray
    p: int = field(default=-1)

    def __post_init__(self):
        X = _readonly(np.atleast_2d(self.Xhat))
        p = X.shape[1] - 2 if self.p < 0 else int(self.p)
        if X.shape[1] != p + 2:
            raise DataError(f"augmented design must have p+2={p + 2} columns, got {X.shape[1]}")
        object.__setattr__(self, "Xhat", X)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.Xhat.shape[0]


def dataset_from_columns(y, X_exo, w, z1, c: float = 0.0, *, prepend_intercept: bool = False) -> Dataset:
    """Build a validated :class:`Dataset` from raw columns.

    With ``prepend_intercept=True`` a column of ones is prepended to
    ``X_exo`` (which may then be empty or 1-d); otherwise the first column
    of ``X_exo`` must already be identically one.
    """
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X_exo, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if prepend_intercept:
        if X.size == 0:
            X = np.ones((y.shape[0], 1))
        else:
            X = np.column_stack([np.ones(X.shape[0]), X])
    return Dataset(y=y, X_exo=X, w=np.asarray(w, dtype=np.float64),
                   z1=np.asarray(z1, dtype=np.float64), c=c)


def censoring_fraction(ds: Dataset) -> float:
    """Fraction of observations stored exactly at the threshold."""
    return float(np.count_nonzero(ds.y == ds.c)) / ds.n
