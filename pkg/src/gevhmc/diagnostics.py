"""Chain diagnostics: autocorrelation, effective sample size, summaries.

ESS follows Geyer's initial monotone positive sequence rule: sum the sample
ACF in adjacent pairs, keep pairs while they stay positive, enforce
monotonicity, and set ESS = N / (2 * sum(pairs) - 1), clamped to (0, N].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PosteriorSummary:
    """Marginal posterior location/scale summaries with a credible interval."""

    mean: float
    sd: float
    mode: float | None
    median: float
    credible_interval: tuple
    interval_prob: float


def autocorrelation(chain_column, max_lag: int) -> np.ndarray:
    """Sample ACF with biased normalization, gamma(0) = 1, lags 0..max_lag."""
    x = np.asarray(chain_column, dtype=float)
    n = x.size
    if max_lag < 0 or n <= max_lag:
        raise ValueError("need chain length greater than max_lag")
    x = x - x.mean()
    var = float(x @ x) / n
    if var == 0.0:
        raise ValueError("autocorrelation undefined for a constant chain")
    nfft = int(2 ** np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1] / n
    return acov / acov[0]


def _geyer_pairs(x: np.ndarray) -> np.ndarray:
    """Truncated, monotone pair sums of the ACF (initial monotone positive sequence)."""
    n = x.size
    acf = autocorrelation(x, n - 1)
    n_pairs = acf.size // 2
    pairs = acf[: 2 * n_pairs : 2] + acf[1 : 2 * n_pairs : 2]
    keep = []
    prev = np.inf
    for g in pairs:
        if g <= 0.0:
            break
        g = min(g, prev)
        keep.append(g)
        prev = g
    if not keep:
        keep = [max(pairs[0], 1e-12)] if n_pairs else [1.0]
    return np.asarray(keep)


def ess(chain_column) -> float:
    """Effective sample size N / (1 + 2 sum_k gamma(k)) with Geyer truncation."""
    x = np.asarray(chain_column, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two samples")
    if np.var(x) == 0.0:
        raise ValueError("ESS undefined for a constant chain")
    tau = 2.0 * float(np.sum(_geyer_pairs(x))) - 1.0
    return float(np.clip(n / max(tau, 1e-12), np.finfo(float).tiny, n))


def _kde_mode(x: np.ndarray, grid_size: int = 512) -> float:
    """Argmax of a Gaussian KDE (Silverman bandwidth) on a grid over the range."""
    sd = float(np.std(x, ddof=1))
    iqr = float(np.subtract(*np.percentile(x, [75, 25])))
    h = 0.9 * min(sd, iqr / 1.34 if iqr > 0 else np.inf) * x.size ** (-0.2)
    if h <= 0:
        return float(np.median(x))
    grid = np.linspace(np.min(x), np.max(x), grid_size)
    dens = np.zeros(grid_size)
    block = 64
    for i in range(0, grid_size, block):
        g = grid[i : i + block, None]
        dens[i : i + block] = np.exp(-0.5 * ((g - x[None, :]) / h) ** 2).sum(axis=1)
    return float(grid[int(np.argmax(dens))])


def summarize(chain_column, interval_prob: float = 0.95) -> PosteriorSummary:
    """Mean, sd, KDE mode, median, and equal-tailed credible interval."""
    x = np.asarray(chain_column, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two samples to summarize")
    if not 0.0 < interval_prob < 1.0:
        raise ValueError("interval_prob must lie in (0, 1)")
    alpha = 0.5 * (1.0 - interval_prob)
    lo, hi = np.quantile(x, [alpha, 1.0 - alpha])
    if x.size >= 100:
        mode = _kde_mode(x)
    else:
        warnings.warn("chain too short for mode estimation; mode omitted", stacklevel=2)
        mode = None
    return PosteriorSummary(
        mean=float(np.mean(x)),
        sd=float(np.std(x, ddof=1)),
        mode=mode,
        median=float(np.median(x)),
        credible_interval=(float(lo), float(hi)),
        interval_prob=interval_prob,
    )


def bias_mse(estimates, truth: float) -> tuple[float, float]:
    """(mean(estimates) - truth, mean((estimates - truth)^2))."""
    e = np.asarray(estimates, dtype=float)
    if e.size == 0:
        raise ValueError("estimates must be nonempty")
    d = e - truth
    return float(np.mean(d)), float(np.mean(d * d))
