import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracles
from tobitm import (
    Dataset,
    DgpConfig,
    IdentificationError,
    first_stage_cov,
    fit_first_stage,
    generate,
)
from conftest import small_dataset


def _dataset_with_Z(w, z1, X_exo, y=None):
    n = len(w)
    y = np.ones(n) if y is None else y
    return Dataset(y=y, X_exo=X_exo, w=np.asarray(w, float),
                   z1=np.asarray(z1, float), c=0.0)


def test_noiseless_regression_recovers_coefficients():
    rng = np.random.default_rng(0)
    n = 5
    z1 = rng.random(n)
    X = np.ones((n, 1))
    w = 2.0 * z1 + 1.0
    ds = _dataset_with_Z(w, z1, X)
    fs = fit_first_stage(ds)
    assert_allclose(fs.delta_hat.delta, [2.0, 1.0], atol=1e-10)
    assert np.abs(fs.residuals).max() < 1e-10


def test_matches_explicit_normal_equations():
    ds = small_dataset(seed=12, n=20)
    fs = fit_first_stage(ds)
    Z = ds.instrument_matrix()
    expected = oracles.normal_equation_solve(Z, ds.w)
    assert_allclose(fs.delta_hat.delta, expected, rtol=1e-9)


def test_residual_orthogonality():
    ds = small_dataset(seed=4, n=200)
    fs = fit_first_stage(ds)
    max_dot = np.abs(fs.Z.T @ fs.residuals).max()
    assert max_dot <= 1e-8 * ds.n * np.abs(ds.w).max()


def test_permutation_invariance():
    ds = small_dataset(seed=9, n=80)
    fs = fit_first_stage(ds)
    perm = np.random.default_rng(1).permutation(ds.n)
    ds_p = Dataset(y=ds.y[perm], X_exo=ds.X_exo[perm], w=ds.w[perm],
                   z1=ds.z1[perm], c=0.0)
    fs_p = fit_first_stage(ds_p)
    assert_allclose(fs.delta_hat.delta, fs_p.delta_hat.delta, atol=1e-12)


def test_collinear_instrument_rejected():
    n = 30
    rng = np.random.default_rng(2)
    x1 = rng.normal(size=n)
    X = np.column_stack([np.ones(n), x1])
    z1 = 2.0 * x1 - 0.5  # exact linear combination of exogenous columns
    ds = Dataset(y=np.ones(n), X_exo=X, w=rng.normal(size=n), z1=z1, c=0.0)
    with pytest.raises(IdentificationError, match="rank deficient|ill-conditioned"):
        fit_first_stage(ds)


def test_cov_blocks_zero_residuals():
    rng = np.random.default_rng(3)
    n = 12
    z1 = rng.random(n)
    X = np.ones((n, 1))
    w = 3.0 * z1 - 1.0 + 0.0
    ds = _dataset_with_Z(w, z1, X)
    fs = fit_first_stage(ds)
    sigma1, D1, omega1 = first_stage_cov(fs)
    assert_allclose(D1, np.zeros_like(D1), atol=1e-18)
    assert_allclose(omega1, np.zeros_like(omega1), atol=1e-12)
    assert_allclose(sigma1, sigma1.T)


def test_single_term_D1():
    # one observation: D1 = e^2 * z z' exactly
    ds = Dataset(y=np.array([1.0, 1.0]), X_exo=np.ones((2, 1)),
                 w=np.array([5.0, -1.0]), z1=np.array([2.0, -1.0]), c=0.0)
    fs = fit_first_stage(ds)
    Z = fs.Z
    e = fs.residuals
    expected = (e[0] ** 2 * np.outer(Z[0], Z[0]) + e[1] ** 2 * np.outer(Z[1], Z[1])) / 2
    assert_allclose(fs.D1_hat, expected, atol=1e-14)


def test_omega1_matches_direct_summation():
    ds = generate(DgpConfig(n=50, seed=77))
    fs = fit_first_stage(ds)
    _, _, omega_direct = oracles.direct_first_stage_cov(fs.Z, fs.residuals)
    assert_allclose(fs.omega1_hat, omega_direct, atol=1e-10)
    # symmetry and PSD of omega1
    assert_allclose(fs.omega1_hat, fs.omega1_hat.T, atol=1e-12)
    assert np.linalg.eigvalsh(fs.omega1_hat).min() >= -1e-10
