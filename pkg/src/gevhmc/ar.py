"""GEV-AR(p) time series model: y_t = mu + sum_j theta_j y_{t-j} + e_t.

Innovations e_t are iid GEV(0, sigma, xi) with xi restricted to (-1/2, 1/2)
so that the innovation mean and variance exist.  Conditional on the first p
observations, y_t is GEV(mu_t, sigma, xi) with mu_t = mu + sum theta_j y_{t-j},
which gives the conditional likelihood, its analytic gradient, and the
moment/forecasting machinery below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .gev import XI_SWITCH_TOL, GevParams, gev_quantile, gev_sample

EULER_GAMMA = float(np.euler_gamma)
ZETA2 = np.pi**2 / 6.0
ZETA3 = 1.2020569031595943


@dataclass(frozen=True)
class GevArModel:
    """AR order p, intercept mu, coefficients theta, innovation (sigma, xi)."""

    p: int
    mu: float
    theta: np.ndarray
    sigma: float
    xi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", np.atleast_1d(np.asarray(self.theta, dtype=float)))
        if self.p < 1 or self.theta.size != self.p:
            raise ValueError(f"theta must have length p = {self.p}")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not -0.5 < self.xi < 0.5:
            raise ValueError(f"xi must lie in (-0.5, 0.5), got {self.xi}")

    def innovation_params(self) -> GevParams:
        return GevParams(0.0, self.sigma, self.xi)


@dataclass(frozen=True)
class TimeSeries:
    """Ordered observations y_1..y_T with optional timestamps."""

    values: np.ndarray
    timestamps: np.ndarray | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1:
            raise ValueError("time series values must be one-dimensional")
        if self.timestamps is not None and len(self.timestamps) != len(self.values):
            raise ValueError("timestamps must align with values")

    def __len__(self) -> int:
        return len(self.values)


def _series_values(data) -> np.ndarray:
    if isinstance(data, TimeSeries):
        return data.values
    return np.asarray(data, dtype=float)


def stationarity_check(theta) -> bool:
    """True when all roots of 1 - theta_1 z - ... - theta_p z^p lie outside the unit circle."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    coeffs = np.concatenate([[1.0], -theta])[::-1]  # highest degree first
    roots = np.roots(coeffs)
    return bool(np.all(np.abs(roots) > 1.0))


def _lag_matrix(y: np.ndarray, p: int) -> np.ndarray:
    """Rows (y_{t-1}, ..., y_{t-p}) for t = p+1..T (0-based t = p..T-1)."""
    windows = np.lib.stride_tricks.sliding_window_view(y, p)[:-1]
    return windows[:, ::-1]


def _conditional_locations(model: GevArModel, y: np.ndarray) -> np.ndarray:
    return model.mu + _lag_matrix(y, model.p) @ model.theta


def ar_loglik(model: GevArModel, data) -> float:
    """Conditional log likelihood over t = p+1..T; -inf if any y_t leaves its support."""
    y = _series_values(data)
    if len(y) <= model.p:
        raise ValueError(f"need more than p = {model.p} observations, got {len(y)}")
    mu_t = _conditional_locations(model, y)
    resid = y[model.p :] - mu_t
    w = resid / model.sigma
    n = w.size
    if abs(model.xi) < XI_SWITCH_TOL:
        return float(-n * np.log(model.sigma) - np.sum(w) - np.sum(np.exp(-w)))
    zm1 = model.xi * w
    if np.any(zm1 <= -1.0):
        return -np.inf
    logz = np.log1p(zm1)
    return float(
        -n * np.log(model.sigma)
        - (1.0 / model.xi + 1.0) * np.sum(logz)
        - np.sum(np.exp(-logz / model.xi))
    )


def _gradient_pieces(xi: float, w: np.ndarray):
    """Per-term score pieces shared by the AR and iid gradients.

    Returns (s, g_sigma_terms, g_xi_terms) where s is the mu-score summand
    times sigma, i.e. z^{-1}((1+xi) - z^{-1/xi}); out-of-support input yields
    None.  The |xi| -> 0 limits follow from expanding z = 1 + xi*w.
    """
    if abs(xi) < XI_SWITCH_TOL:
        e = np.exp(-w)
        s = 1.0 - e
        g_sigma = -1.0 + w * s
        g_xi = 0.5 * w * w * (1.0 - e) - w
        return s, g_sigma, g_xi
    zm1 = xi * w
    if np.any(zm1 <= -1.0):
        return None
    logz = np.log1p(zm1)
    zinv = 1.0 / (1.0 + zm1)
    t = np.exp(-logz / xi)  # z^{-1/xi}
    s = zinv * ((1.0 + xi) - t)
    tz = t * zinv
    g_sigma = -1.0 + (1.0 + xi) * w * zinv - w * tz
    g_xi = (
        logz / xi**2
        - (1.0 / xi + 1.0) * w * zinv
        + (w / xi) * tz
        - (logz / xi**2) * t
    )
    return s, g_sigma, g_xi


def ar_grad_loglik(model: GevArModel, data):
    """Natural-scale gradient (d/dmu, d/dtheta_1..p, d/dsigma, d/dxi) of ar_loglik.

    Returns None when any observation violates the support constraint.
    """
    y = _series_values(data)
    if len(y) <= model.p:
        raise ValueError(f"need more than p = {model.p} observations, got {len(y)}")
    lags = _lag_matrix(y, model.p)
    mu_t = model.mu + lags @ model.theta
    w = (y[model.p :] - mu_t) / model.sigma
    pieces = _gradient_pieces(model.xi, w)
    if pieces is None:
        return None
    s, g_sigma, g_xi = pieces
    g_mu = np.sum(s) / model.sigma
    g_theta = (lags.T @ s) / model.sigma
    return np.concatenate([[g_mu], g_theta, [np.sum(g_sigma) / model.sigma, np.sum(g_xi)]])


def _innovation_moments(sigma: float, xi: float) -> tuple[float, float]:
    """(mean, variance) of a GEV(0, sigma, xi) innovation, xi in (-1/2, 1/2)."""
    if abs(xi) < 1e-4:
        # Series around xi = 0 avoids the 0/0 cancellation in the closed forms.
        mean = sigma * (EULER_GAMMA + 0.5 * (EULER_GAMMA**2 + ZETA2) * xi)
        var = sigma**2 * np.exp(2.0 * EULER_GAMMA * xi) * (ZETA2 + 2.0 * ZETA3 * xi)
        return float(mean), float(var)
    g1 = gamma_fn(1.0 - xi)
    g2 = gamma_fn(1.0 - 2.0 * xi)
    return float(sigma * (g1 - 1.0) / xi), float((sigma / xi) ** 2 * (g2 - g1 * g1))


def stationary_moments(model: GevArModel) -> tuple[float, float, float]:
    """(mu_e, var_e, mu_Y): innovation mean/variance and the stationary series mean."""
    if not -0.5 < model.xi < 0.5:
        raise ValueError("xi must lie in (-0.5, 0.5)")
    theta_sum = float(np.sum(model.theta))
    if abs(1.0 - theta_sum) < 1e-12:
        raise ValueError("sum of AR coefficients equals 1; stationary mean undefined")
    mu_e, var_e = _innovation_moments(model.sigma, model.xi)
    mu_y = (mu_e + model.mu) / (1.0 - theta_sum)
    return mu_e, var_e, mu_y


def yule_walker_covariances(model: GevArModel) -> np.ndarray:
    """Stationary autocovariances c(0..p) solved exactly from the Yule-Walker system."""
    if not stationarity_check(model.theta):
        raise ValueError("AR coefficients are not stationary")
    p = model.p
    theta = model.theta
    _, var_e, _ = stationary_moments(model)
    # Unknowns c(0..p); row k encodes c(k) = sum_j theta_j c(|k-j|) (+ var_e at k=0).
    a = np.zeros((p + 1, p + 1))
    b = np.zeros(p + 1)
    for k in range(p + 1):
        a[k, k] += 1.0
        for j in range(1, p + 1):
            a[k, abs(k - j)] -= theta[j - 1]
        b[k] = var_e if k == 0 else 0.0
    return np.linalg.solve(a, b)


def simulate_gev_ar(model: GevArModel, n: int, seed, burn_in: int = 500):
    """Simulate n observations of the GEV-AR recursion after a discarded transient.

    The recursion starts from the stationary mean; ``burn_in`` initial draws
    are discarded.  Deterministic for a fixed integer seed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not stationarity_check(model.theta):
        raise ValueError("AR coefficients are not stationary")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    _, _, mu_y = stationary_moments(model)
    p = model.p
    innov = gev_sample(model.innovation_params(), n + burn_in, rng)
    buf = np.empty(n + burn_in + p)
    buf[:p] = mu_y
    theta_rev = model.theta[::-1]
    for t in range(n + burn_in):
        buf[p + t] = model.mu + buf[t : t + p] @ theta_rev + innov[t]
    return TimeSeries(buf[p + burn_in :])


def forecast(model_samples, data, horizon: int, seed):
    """Monte Carlo j-step-ahead predictive forecasts from posterior draws.

    ``model_samples`` is an (N, p+3) array of natural-scale draws ordered
    (mu, theta_1..theta_p, sigma, xi) or a SampleChain holding one.  Each
    draw extends the observed series recursively with GEV innovations;
    lags not yet observed use that draw's own sampled values.  Returns a
    list of (point, (lo, hi)) with equal-tailed 95% intervals.
    """
    draws = getattr(model_samples, "draws", model_samples)
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 2 or draws.shape[0] == 0 or draws.shape[1] < 4:
        raise ValueError("model_samples must be a nonempty (N, p+3) draw matrix")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    p = draws.shape[1] - 3
    y = _series_values(data)
    if len(y) < p:
        raise ValueError(f"need at least p = {p} observations to seed the forecast recursion")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = draws.shape[0]
    mu = draws[:, 0]
    theta = draws[:, 1 : 1 + p]
    sigma = draws[:, 1 + p]
    xi = draws[:, 2 + p]

    # Rolling window of the p most recent values per draw, newest first.
    recent = np.tile(y[-p:][::-1], (n, 1))
    u = np.clip(rng.random((n, horizon)), 1e-300, 1.0 - 1e-16)
    out = []
    for j in range(horizon):
        loc = mu + np.einsum("ij,ij->i", theta, recent)
        e = _gev_quantile_rows(sigma, xi, u[:, j])
        y_new = loc + e
        point = float(np.mean(y_new))
        lo, hi = np.quantile(y_new, [0.025, 0.975])
        out.append((point, (float(lo), float(hi))))
        if p > 1:
            recent[:, 1:] = recent[:, :-1]
        recent[:, 0] = y_new
    return out


def _gev_quantile_rows(sigma, xi, u):
    """Vectorized GEV(0, sigma_i, xi_i) quantiles with per-row shape values."""
    t = np.log(-np.log(u))
    out = np.empty_like(u)
    near0 = np.abs(xi) < XI_SWITCH_TOL
    if np.any(near0):
        out[near0] = -sigma[near0] * t[near0]
    rest = ~near0
    if np.any(rest):
        out[rest] = sigma[rest] * np.expm1(-xi[rest] * t[rest]) / xi[rest]
    return out
