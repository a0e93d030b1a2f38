"""Generalized extreme value distribution: density, cdf, quantiles, sampling.

Parameterization: location mu, scale sigma > 0, shape xi.  For xi != 0 the
support is {y : 1 + xi*(y - mu)/sigma > 0}; for xi = 0 (Gumbel) it is the
whole real line.  Shape values with |xi| below ``XI_SWITCH_TOL`` are
evaluated on the Gumbel branch to avoid catastrophic cancellation in the
z**(-1/xi) terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Below this |xi| the Gumbel branch is used everywhere.
XI_SWITCH_TOL = 1e-8


@dataclass(frozen=True)
class GevParams:
    """GEV parameter triple (mu, sigma, xi) on the natural scale."""

    mu: float
    sigma: float
    xi: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and np.isfinite(self.sigma) and np.isfinite(self.xi)):
            raise ValueError("GEV parameters must be finite")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def support(self) -> tuple[float, float]:
        """Return the (lower, upper) endpoints of the support."""
        if abs(self.xi) < XI_SWITCH_TOL:
            return (-np.inf, np.inf)
        bound = self.mu - self.sigma / self.xi
        if self.xi > 0:
            return (bound, np.inf)
        return (-np.inf, bound)

    def in_support(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if abs(self.xi) < XI_SWITCH_TOL:
            return np.ones_like(y, dtype=bool)
        return 1.0 + self.xi * (y - self.mu) / self.sigma > 0.0


def gev_logpdf(params: GevParams, y):
    """Log density of the GEV distribution; -inf outside the support."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    w = (y - params.mu) / params.sigma
    if abs(params.xi) < XI_SWITCH_TOL:
        out = -np.log(params.sigma) - w - np.exp(-w)
    else:
        zm1 = params.xi * w
        out = np.full_like(y, -np.inf)
        ok = zm1 > -1.0
        logz = np.log1p(zm1[ok])
        out[ok] = (
            -np.log(params.sigma)
            - (1.0 / params.xi + 1.0) * logz
            - np.exp(-logz / params.xi)
        )
    return float(out[0]) if scalar else out


def gev_cdf(params: GevParams, y):
    """GEV distribution function H(y); 0 or 1 beyond finite endpoints."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    w = (y - params.mu) / params.sigma
    if abs(params.xi) < XI_SWITCH_TOL:
        out = np.exp(-np.exp(-w))
    else:
        zm1 = params.xi * w
        # Outside the support the cdf saturates at 0 (Frechet side) or 1
        # (upper-bounded Weibull side).
        out = np.full_like(y, 0.0 if params.xi > 0 else 1.0)
        ok = zm1 > -1.0
        out[ok] = np.exp(-np.exp(-np.log1p(zm1[ok]) / params.xi))
    return float(out[0]) if scalar else out


def gev_quantile(params: GevParams, u):
    """Quantile function: the y with gev_cdf(params, y) = u, for u in (0, 1)."""
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("quantile argument must lie strictly inside (0, 1)")
    t = -np.log(u)
    if abs(params.xi) < XI_SWITCH_TOL:
        out = params.mu - params.sigma * np.log(t)
    else:
        out = params.mu + params.sigma * np.expm1(-params.xi * np.log(t)) / params.xi
    return float(out[0]) if scalar else out


def gev_sample(params: GevParams, n: int, seed) -> np.ndarray:
    """Draw n iid GEV variates by inverting the cdf on uniform variates.

    ``seed`` may be an integer or a caller-owned numpy Generator; the
    output is deterministic for a fixed integer seed.
    """
    if n < 1:
        raise ValueError("sample size must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.random(n)
    # Keep u strictly inside (0, 1); rng.random can return exactly 0.
    u = np.clip(u, 1e-300, 1.0 - 1e-16)
    return gev_quantile(params, u)


def gev_loglik(params: GevParams, data) -> float:
    """Joint log likelihood of iid observations; -inf on any support violation."""
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("data must be nonempty")
    lp = gev_logpdf(params, data)
    if np.any(np.isneginf(lp)):
        return -np.inf
    return float(np.sum(lp))
