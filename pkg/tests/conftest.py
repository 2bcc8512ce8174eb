import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes oracles importable

from tobitm import Dataset, DgpConfig, generate


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)


def small_dataset(seed: int = 3, n: int = 40) -> Dataset:
    """A synthetic dataset from the standard generating process."""
    return generate(DgpConfig(n=n, seed=seed))


@pytest.fixture
def tiny_ds():
    return small_dataset(seed=7, n=40)


def uncensored_dataset(rng, n=60, p=2, spread=0.5):
    """A dataset whose responses stay far above zero (no binding censoring)
    and whose fitted values remain positive: max(0, .) is inactive."""
    x1 = rng.normal(0.0, 1.0, n)
    z = rng.uniform(0.0, 1.0, n)
    e2 = rng.normal(0.0, 1.0, n)
    w = z + e2
    eps = rng.normal(0.0, spread, n)
    y = 20.0 + 1.5 * x1 + 0.8 * w + eps
    X = np.column_stack([np.ones(n), x1])
    return Dataset(y=y, X_exo=X, w=w, z1=z, c=0.0)
