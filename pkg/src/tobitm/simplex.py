"""Deterministic Nelder-Mead simplex minimizer with shrinking restarts.

The second-stage objective is piecewise smooth at best (absolute error is
not differentiable on the censoring boundary), so a derivative-free
minimizer is used throughout.  A single :func:`nelder_mead` call runs one
plain simplex pass from the start point and then ``n_restarts`` further
passes, each re-initialized around the incumbent best with the simplex
scale halved; that escapes the collapsed simplices piecewise-linear
objectives tend to produce.  :func:`multi_start` repeats the whole thing
from several starting points and keeps the best result.

Everything here is pure: identical inputs give bitwise-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DataError, NonFiniteError

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class SimplexConfig:
    """Nelder-Mead controls.

    ``init_step=None`` means the default per-coordinate scale
    0.1*max(1, |x0_j|).  ``max_iters=None`` resolves to 500*dim at call
    time.  The function-spread test is relative, the vertex-spread test
    absolute; either one terminates a pass.
    """

    init_step: Optional[float] = None
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    max_iters: Optional[int] = None
    n_restarts: int = 4

    def __post_init__(self):
        if not (self.reflection > 0 and self.expansion > 1
                and 0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise DataError("simplex coefficients out of range: need reflection>0, "
                            "expansion>1, 0<contraction<1, 0<shrink<1")
        if self.f_tol <= 0 or self.x_tol <= 0:
            raise DataError("f_tol and x_tol must be positive")
        if self.n_restarts < 0:
            raise DataError("n_restarts must be nonnegative")

    def resolve_max_iters(self, dim: int) -> int:
        return 500 * dim if self.max_iters is None else int(self.max_iters)

    def base_step(self, x0: np.ndarray) -> np.ndarray:
        if self.init_step is not None:
            return np.full_like(x0, float(self.init_step))
        return 0.1 * np.maximum(1.0, np.abs(x0))


@dataclass(frozen=True)
class OptResult:
    x_min: np.ndarray
    f_min: float
    iters: int
    converged: bool
    restart_history: tuple = ()
    start_errors: tuple = ()


def _checked_eval(f: Objective, x: np.ndarray) -> float:
    val = float(f(x))
    if not np.isfinite(val):
        raise NonFiniteError(f"objective returned {val} at {np.array2string(x, precision=6)}")
    return val


def _simplex_pass(f: Objective, x0: np.ndarray, step: np.ndarray,
                  cfg: SimplexConfig, max_iters: int):
    """One Nelder-Mead run. Returns (x_best, f_best, iters, converged)."""
    dim = x0.size
    verts = np.tile(x0, (dim + 1, 1))
    for j in range(dim):
        verts[j + 1, j] += step[j] if step[j] != 0.0 else cfg.x_tol
    fvals = np.array([_checked_eval(f, v) for v in verts])

    iters = 0
    converged = False
    while iters < max_iters:
        order = np.argsort(fvals, kind="stable")
        verts = verts[order]
        fvals = fvals[order]
        f_best, f_worst = fvals[0], fvals[-1]

        if (f_worst - f_best) <= cfg.f_tol * (abs(f_best) + cfg.f_tol):
            converged = True
            break
        if np.abs(verts[1:] - verts[0]).max() <= cfg.x_tol:
            converged = True
            break

        iters += 1
        centroid = verts[:-1].mean(axis=0)
        xr = centroid + cfg.reflection * (centroid - verts[-1])
        fr = _checked_eval(f, xr)

        if fr < fvals[0]:
            xe = centroid + cfg.expansion * (centroid - verts[-1])
            fe = _checked_eval(f, xe)
            if fe < fr:
                verts[-1], fvals[-1] = xe, fe
            else:
                verts[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
            continue

        if fr < fvals[-1]:
            # outside contraction
            xc = centroid + cfg.contraction * (xr - centroid)
            fc = _checked_eval(f, xc)
            if fc <= fr:
                verts[-1], fvals[-1] = xc, fc
                continue
        else:
            # inside contraction
            xc = centroid + cfg.contraction * (verts[-1] - centroid)
            fc = _checked_eval(f, xc)
            if fc < fvals[-1]:
                verts[-1], fvals[-1] = xc, fc
                continue

        # shrink toward the best vertex
        verts[1:] = verts[0] + cfg.shrink * (verts[1:] - verts[0])
        fvals[1:] = [_checked_eval(f, v) for v in verts[1:]]

    order = np.argsort(fvals, kind="stable")
    return verts[order[0]].copy(), float(fvals[order[0]]), iters, converged


def nelder_mead(f: Objective, x0, cfg: SimplexConfig = SimplexConfig()) -> OptResult:
    """Minimize ``f`` from ``x0``: one plain pass plus shrinking restarts."""
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    if not np.isfinite(x0).all():
        raise NonFiniteError("start point contains non-finite values")
    max_iters = cfg.resolve_max_iters(x0.size)
    base = cfg.base_step(x0)

    history = []
    total_iters = 0
    best_x, best_f = None, np.inf
    converged = False
    for k in range(cfg.n_restarts + 1):
        start = x0 if k == 0 else best_x
        xk, fk, it, converged = _simplex_pass(f, start, base * (0.5 ** k), cfg, max_iters)
        total_iters += it
        history.append((xk, fk))
        if fk < best_f:
            best_x, best_f = xk, fk

    return OptResult(x_min=best_x, f_min=best_f, iters=total_iters,
                     converged=converged, restart_history=tuple(history))


def multi_start(f: Objective, starts: Sequence, cfg: SimplexConfig = SimplexConfig()) -> OptResult:
    """Run :func:`nelder_mead` from every start and keep the best result.

    A failed start (non-finite objective) is recorded and skipped; only if
    every start fails is the last error re-raised.  Ties within ``f_tol``
    break toward the solution with smallest Euclidean norm.
    """
    starts = list(starts)
    if not starts:
        raise DataError("multi_start needs at least one start point")

    results = []
    errors = []
    last_exc = None
    for x0 in starts:
        try:
            results.append(nelder_mead(f, x0, cfg))
        except NonFiniteError as exc:
            errors.append(str(exc))
            last_exc = exc
    if not results:
        raise last_exc

    f_best = min(r.f_min for r in results)
    tied = [r for r in results if r.f_min <= f_best + cfg.f_tol * (abs(f_best) + cfg.f_tol)]
    winner = min(tied, key=lambda r: (float(np.linalg.norm(r.x_min)), r.f_min))

    history = tuple(entry for r in results for entry in r.restart_history)
    return OptResult(
        x_min=winner.x_min,
        f_min=winner.f_min,
        iters=sum(r.iters for r in results),
        converged=winner.converged,
        restart_history=history,
        start_errors=tuple(errors),
    )
