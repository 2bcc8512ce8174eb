"""Independent oracles used by the tests.

Everything here recomputes quantities from first principles (explicit
normal equations, direct summation, exhaustive lattice search, an LP
solve for least absolute deviations) without touching the library code
paths it is used to check.  Loss formulas are re-stated locally on
purpose.
"""

import numpy as np
from scipy.optimize import linprog


def rho_abs(u):
    return np.abs(u)


def rho_huber(u, d):
    au = np.abs(u)
    return np.where(au <= d, 0.5 * u * u, d * (au - 0.5 * d))


def rho_logcosh(u):
    au = np.abs(u)
    return au + np.log1p(np.exp(-2.0 * au)) - np.log(2.0)


ORACLE_RHO = {
    "clad": rho_abs,
    "wme": lambda u: rho_huber(u, 1.35),
    "logcosh": rho_logcosh,
}


def normal_equation_solve(Z, w):
    """delta = (Z'Z)^{-1} Z'w via explicit inverse (oracle only)."""
    return np.linalg.inv(Z.T @ Z) @ (Z.T @ w)


def direct_first_stage_cov(Z, e):
    """Loop-summed sigma1, D1, omega1."""
    n, k = Z.shape
    sigma1 = np.zeros((k, k))
    D1 = np.zeros((k, k))
    for i in range(n):
        zi = Z[i][:, None]
        sigma1 += zi @ zi.T
        D1 += e[i] ** 2 * (zi @ zi.T)
    sigma1 /= n
    D1 /= n
    inv = np.linalg.inv(sigma1)
    return sigma1, D1, inv @ D1 @ inv.T


def censored_objective(beta, Xhat, y, rho):
    """Direct-summation Q_n for threshold-zero data."""
    total = 0.0
    for i in range(Xhat.shape[0]):
        fitted = max(0.0, float(Xhat[i] @ beta))
        total += float(rho(np.float64(y[i] - fitted)))
    return total / Xhat.shape[0]


def grid_search_min(Xhat, y, rho, center, halfwidth=1.0, step=0.05, chunk=200_000):
    """Exhaustive lattice search of the censored objective around ``center``.

    Returns (best_beta, best_objective) over the axis-aligned lattice
    center +/- halfwidth with the given step, vectorized in chunks.
    """
    center = np.asarray(center, dtype=np.float64)
    offsets = np.arange(-halfwidth, halfwidth + step / 2, step)
    grids = np.meshgrid(*[center[j] + offsets for j in range(center.size)],
                        indexing="ij")
    lattice = np.stack([g.ravel() for g in grids], axis=1)

    best_val = np.inf
    best_beta = None
    y = np.asarray(y, dtype=np.float64)
    for start in range(0, lattice.shape[0], chunk):
        block = lattice[start:start + chunk]
        fitted = np.maximum(Xhat @ block.T, 0.0)
        vals = rho(y[:, None] - fitted).mean(axis=0)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_beta = block[j].copy()
    return best_beta, best_val


def lad_solve(X, y):
    """Least absolute deviations via linear programming (HiGHS).

    min sum(u+ + u-)  s.t.  X b + u+ - u- = y,  u+, u- >= 0.
    """
    n, k = X.shape
    c = np.concatenate([np.zeros(k), np.ones(2 * n)])
    A_eq = np.hstack([X, np.eye(n), -np.eye(n)])
    bounds = [(None, None)] * k + [(0, None)] * (2 * n)
    res = linprog(c, A_eq=A_eq, b_eq=y, bounds=bounds, method="highs")
    assert res.status == 0, f"LAD LP failed: {res.message}"
    return res.x[:k], res.fun / n


def direct_score(Xhat, y, beta, psi):
    """Loop-summed empirical score (negated mean of psi-weighted rows)."""
    n, k = Xhat.shape
    total = np.zeros(k)
    for i in range(n):
        xb = float(Xhat[i] @ beta)
        if xb > 0.0:
            total += psi(np.float64(y[i] - xb)) * Xhat[i]
    return -total / n


def direct_blocks(Xhat, Z, y, beta, rho1, psi, psi_prime):
    """Loop-summed covariance blocks (sigma2_beta, sigma2_delta, D2)."""
    n, k = Xhat.shape
    m = Z.shape[1]
    s2b = np.zeros((k, k))
    s2d = np.zeros((k, m))
    d2 = np.zeros((k, k))
    for i in range(n):
        xb = float(Xhat[i] @ beta)
        if xb <= 0.0:
            continue
        eps = np.float64(y[i] - xb)
        xi = Xhat[i][:, None]
        zi = Z[i][:, None]
        s2b += float(psi_prime(eps)) * (xi @ xi.T)
        s2d += float(psi_prime(eps)) * rho1 * (xi @ zi.T)
        d2 += float(psi(eps)) ** 2 * (xi @ xi.T)
    return s2b / n, s2d / n, d2 / n
