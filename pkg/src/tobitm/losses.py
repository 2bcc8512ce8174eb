"""Loss functions for the second-stage M-estimation.

A :class:`LossSpec` bundles a symmetric, Lipschitz loss ``rho`` with its
(sub)derivative ``psi`` and, where it exists almost everywhere, the second
derivative ``psi_prime``.  Three concrete losses are provided:

* absolute error (``clad``),
* Huber / winsorized squared error with tuning ``d`` (``wme``),
* log-cosh (``logcosh``).

All callables are vectorized over numpy arrays.  The registry is open:
custom losses can be registered by name, and every registration runs a
grid-based checker enforcing the properties the asymptotic theory needs
(evenness, rho(0)=0, Lipschitz bound, bounded nondecreasing psi).  Plain
squared error fails the Lipschitz check and is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .errors import DataError

LOG2 = math.log(2.0)

_CHECK_GRID = np.linspace(-50.0, 50.0, 10_001)


@dataclass(frozen=True)
class LossSpec:
    """A loss rho with first derivative psi and second derivative psi_prime.

    ``psi_prime`` may be ``None`` when no classical second derivative exists
    (absolute error); covariance estimation then falls back to
    :func:`smoothed_psi_prime`.  ``smooth`` records whether ``psi_prime``
    exists classically outside a null set.  ``lipschitz_k`` bounds
    |rho(x)-rho(y)| / |x-y| and ``psi_bound`` bounds |psi|.
    """

    name: str
    rho: Callable[[np.ndarray], np.ndarray]
    psi: Callable[[np.ndarray], np.ndarray]
    psi_prime: Optional[Callable[[np.ndarray], np.ndarray]]
    lipschitz_k: float
    psi_bound: float
    smooth: bool
    params: Dict[str, float] = field(default_factory=dict)

    def label(self) -> str:
        """Canonical ``name`` or ``name:key=value`` spelling."""
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}:{inner}"


def clad() -> LossSpec:
    """Absolute-error loss: rho(x)=|x|, psi=sign with psi(0)=0."""
    return LossSpec(
        name="clad",
        rho=np.abs,
        psi=np.sign,
        psi_prime=None,
        lipschitz_k=1.0,
        psi_bound=1.0,
        smooth=False,
    )


def wme(d: float = 1.35) -> LossSpec:
    """Huber loss with tuning parameter ``d``: quadratic inside [-d, d],
    linear outside."""
    d = float(d)
    if d <= 0:
        raise DataError(f"wme tuning parameter d must be positive, got {d}")

    def rho(x):
        x = np.asarray(x, dtype=np.float64)
        ax = np.abs(x)
        return np.where(ax <= d, 0.5 * x * x, d * (ax - 0.5 * d))

    def psi(x):
        return np.clip(x, -d, d)

    def psi_prime(x):
        x = np.asarray(x, dtype=np.float64)
        return (np.abs(x) < d).astype(np.float64)

    return LossSpec(
        name="wme",
        rho=rho,
        psi=psi,
        psi_prime=psi_prime,
        lipschitz_k=d,
        psi_bound=d,
        smooth=True,
        params={"d": d},
    )


def log_cosh() -> LossSpec:
    """log(cosh(x)) loss, computed overflow-safely as |x| + log1p(e^{-2|x|}) - log 2."""

    def rho(x):
        x = np.asarray(x, dtype=np.float64)
        ax = np.abs(x)
        return ax + np.log1p(np.exp(-2.0 * ax)) - LOG2

    def psi(x):
        return np.tanh(x)

    def psi_prime(x):
        t = np.tanh(x)
        return 1.0 - t * t

    return LossSpec(
        name="logcosh",
        rho=rho,
        psi=psi,
        psi_prime=psi_prime,
        lipschitz_k=1.0,
        psi_bound=1.0,
        smooth=True,
    )


def smoothed_psi_prime(loss: LossSpec, h: float) -> Callable[[np.ndarray], np.ndarray]:
    """Central-difference surrogate for psi_prime at bandwidth ``h``.

    For smooth losses this converges to ``psi_prime`` as h -> 0; for
    absolute error it spreads the unit jump of sign() over a 2h window,
    which is what makes the covariance plug-in computable for CLAD.
    """
    h = float(h)
    if h <= 0:
        raise DataError(f"bandwidth h must be positive, got {h}")

    def fn(x):
        x = np.asarray(x, dtype=np.float64)
        return (loss.psi(x + h) - loss.psi(x - h)) / (2.0 * h)

    return fn


def effective_psi_prime(loss: LossSpec, h: float) -> Callable[[np.ndarray], np.ndarray]:
    """psi_prime itself when the loss has one, else the smoothed surrogate."""
    if loss.smooth and loss.psi_prime is not None:
        return loss.psi_prime
    return smoothed_psi_prime(loss, h)


def validate_loss(loss: LossSpec, grid: np.ndarray = _CHECK_GRID) -> None:
    """Check the registration invariants on a sampled grid; raise DataError."""
    if loss.lipschitz_k <= 0 or loss.psi_bound <= 0:
        raise DataError(f"loss {loss.name!r}: lipschitz_k and psi_bound must be positive")
    r = np.asarray(loss.rho(grid), dtype=np.float64)
    if not np.isfinite(r).all():
        raise DataError(f"loss {loss.name!r}: rho not finite on the check grid")
    if abs(float(loss.rho(np.float64(0.0)))) > 1e-12:
        raise DataError(f"loss {loss.name!r}: rho(0) != 0")
    if (r < -1e-12).any():
        raise DataError(f"loss {loss.name!r}: rho takes negative values")
    if not np.allclose(r, r[::-1], rtol=0.0, atol=1e-10 * (1.0 + r.max())):
        raise DataError(f"loss {loss.name!r}: rho is not even")
    # Lipschitz bound, checked on adjacent grid pairs and on long-range pairs.
    dx = grid[1] - grid[0]
    slope = np.abs(np.diff(r)) / dx
    if slope.max() > loss.lipschitz_k * (1.0 + 1e-8):
        raise DataError(
            f"loss {loss.name!r}: |rho(x)-rho(y)| exceeds lipschitz_k*|x-y| "
            f"(observed slope {slope.max():.6g} > k={loss.lipschitz_k:.6g})"
        )
    s = np.asarray(loss.psi(grid), dtype=np.float64)
    if not np.isfinite(s).all():
        raise DataError(f"loss {loss.name!r}: psi not finite on the check grid")
    if np.abs(s).max() > loss.psi_bound * (1.0 + 1e-8):
        raise DataError(f"loss {loss.name!r}: |psi| exceeds psi_bound")
    if (np.diff(s) < -1e-10).any():
        raise DataError(f"loss {loss.name!r}: psi is not nondecreasing")


_REGISTRY: Dict[str, Callable[..., LossSpec]] = {}


def register_loss(name: str, factory: Callable[..., LossSpec], **probe_params) -> None:
    """Register a loss factory under ``name`` after validating a probe instance."""
    validate_loss(factory(**probe_params))
    _REGISTRY[name] = factory


def make_loss(name: str, **params) -> LossSpec:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise DataError(
            f"unknown loss {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None
    return factory(**params)


def loss_from_spec(spec: str) -> LossSpec:
    """Parse ``clad``, ``wme:d=1.35``, ``logcosh``-style selectors."""
    spec = spec.strip()
    if ":" not in spec:
        return make_loss(spec)
    name, _, rest = spec.partition(":")
    params = {}
    for item in rest.split(","):
        if not item:
            continue
        key, eq, value = item.partition("=")
        if not eq:
            raise DataError(f"malformed loss parameter {item!r} in {spec!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise DataError(f"loss parameter {key!r} must be numeric, got {value!r}") from None
    return make_loss(name.strip(), **params)


register_loss("clad", clad)
register_loss("wme", wme)
register_loss("logcosh", log_cosh)
