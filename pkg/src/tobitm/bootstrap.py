"""Pairs bootstrap for the two-stage fit.

Resamples whole observations (response, exogenous row, endogenous value,
instrument) with replacement and re-runs *both* stages on every resample;
re-estimating the first stage inside each resample is what propagates the
control-function uncertainty into the bootstrap spread.  The summary is
the mean squared deviation of resample estimates from the full-data
estimate, parameter by parameter.

Resample indices are a pure function of (seed, resample index, attempt),
so reports are reproducible regardless of execution order or parallelism.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset
from .errors import DataError, NumericalError
from .estimator import fit
from .losses import LossSpec, loss_from_spec
from .montecarlo import child_seed
from .simplex import SimplexConfig

MAX_REDRAWS = 10


@dataclass(frozen=True)
class BootReport:
    theta_hat: np.ndarray
    B: int
    bmse: np.ndarray
    boot_estimates: np.ndarray
    failures: int


def resample_indices(seed: int, b: int, attempt: int, n: int) -> np.ndarray:
    """Row indices for resample ``b``; depends only on (seed, b, attempt, n)."""
    rng = np.random.default_rng(np.random.SeedSequence(child_seed(seed, b, attempt)))
    return rng.integers(0, n, size=n)


def _resample(ds: Dataset, idx: np.ndarray) -> Dataset:
    return Dataset(y=ds.y[idx], X_exo=ds.X_exo[idx], w=ds.w[idx], z1=ds.z1[idx], c=ds.c)


def _one_resample(args):
    """Worker: resample b with redraws. Returns (b, estimate-or-None)."""
    arrays, c, loss_label, nm_cfg, seed, b = args
    y, X, w, z1 = arrays
    ds = Dataset(y=y, X_exo=X, w=w, z1=z1, c=c)
    loss = loss_from_spec(loss_label)
    for attempt in range(MAX_REDRAWS):
        idx = resample_indices(seed, b, attempt, ds.n)
        try:
            refit = fit(_resample(ds, idx), loss, nm_cfg)
        except NumericalError:
            continue
        return b, refit.beta_hat.to_array()
    return b, None


def bootstrap_bmse(ds: Dataset, loss: LossSpec, B: int, seed: int,
                   nm_cfg: Optional[SimplexConfig] = None, jobs: int = 1) -> BootReport:
    """Full-data fit plus B pairs-bootstrap refits and their BMSE."""
    if B < 1:
        raise DataError("bootstrap resample count B must be at least 1")
    nm_cfg = nm_cfg or SimplexConfig()

    full = fit(ds, loss, nm_cfg)
    theta = full.beta_hat.to_array()

    arrays = (ds.y, ds.X_exo, ds.w, ds.z1)
    tasks = [(arrays, ds.c, loss.label(), nm_cfg, seed, b) for b in range(B)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_resample, tasks, chunksize=4))
    else:
        results = [_one_resample(t) for t in tasks]
    results.sort(key=lambda t: t[0])

    estimates = [est for _, est in results if est is not None]
    failures = B - len(estimates)
    if not estimates:
        raise NumericalError("every bootstrap resample failed to fit")

    boot = np.vstack(estimates)
    bmse = ((boot - theta) ** 2).mean(axis=0)

    return BootReport(theta_hat=theta, B=B, bmse=bmse,
                      boot_estimates=boot, failures=failures)
