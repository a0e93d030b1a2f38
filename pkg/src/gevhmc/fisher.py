"""Expected Fisher information metrics for the iid GEV and GEV-AR models.

The per-observation GEV information uses the constants

    A = (1+xi)^2 Gamma(1+2xi),
    B = Gamma(2+xi) [psi(1+xi) + (1+xi)/xi],

with digamma psi and Euler's constant.  The AR(p) blocks scale the
mu-row entries by the stationary first and second moments of the series.
Entries are assembled on the natural scale and mapped to the sampling
coordinates (delta = log sigma, and eta for the AR shape), then the
negative Hessian of the log prior is added, giving the constant metric
used by the fixed-metric sampler.

For |xi| below a small threshold the closed forms lose precision to
cancellation (terms grow like 1/xi^4), so the matrix is then evaluated by
numerical quadrature of the score outer product instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import digamma, gamma as gamma_fn

from .ar import EULER_GAMMA, GevArModel, _series_values, stationary_moments, yule_walker_covariances
from .priors import PriorSpec, ar_default_prior, iid_default_prior
from .transforms import eta_from_xi, _sigmoid

# Below this |xi| the closed-form entries are replaced by quadrature.
_XI_CLOSED_FORM_MIN = 0.01


class NonPositiveDefiniteError(ValueError):
    """Raised when a metric fails its Cholesky factorization."""

    def __init__(self, minor: int):
        self.minor = minor
        super().__init__(f"metric is not positive definite: leading {minor}x{minor} minor fails")


@dataclass(frozen=True)
class FisherMetric:
    """SPD metric on the sampling coordinates with its Cholesky factor."""

    matrix: np.ndarray
    cholesky: np.ndarray
    log_det: float

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "FisherMetric":
        matrix = np.asarray(matrix, dtype=float)
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12):
            raise ValueError("metric must be symmetric")
        matrix = 0.5 * (matrix + matrix.T)
        try:
            chol = np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            raise _failing_minor(matrix) from None
        return cls(matrix=matrix, cholesky=chol, log_det=2.0 * float(np.sum(np.log(np.diag(chol)))))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _failing_minor(matrix: np.ndarray) -> NonPositiveDefiniteError:
    for k in range(1, matrix.shape[0] + 1):
        try:
            np.linalg.cholesky(matrix[:k, :k])
        except np.linalg.LinAlgError:
            return NonPositiveDefiniteError(k)
    return NonPositiveDefiniteError(matrix.shape[0])


def gev_expected_information(sigma: float, xi: float) -> np.ndarray:
    """Per-observation expected information for (mu, sigma, xi), xi > -1/2."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if xi <= -0.5:
        raise ValueError("expected information requires xi > -0.5")
    if abs(xi) < _XI_CLOSED_FORM_MIN:
        return _information_by_quadrature(sigma, xi)
    a = (1.0 + xi) ** 2 * gamma_fn(1.0 + 2.0 * xi)
    g2 = gamma_fn(2.0 + xi)
    b = g2 * (digamma(1.0 + xi) + (1.0 + xi) / xi)
    i_mm = a / sigma**2
    i_ms = -(a - g2) / (sigma**2 * xi)
    i_mx = -(b - a / xi) / (sigma * xi)
    i_ss = (1.0 - 2.0 * g2 + a) / (sigma**2 * xi**2)
    i_sx = -(1.0 - EULER_GAMMA + (1.0 - g2) / xi - b + a / xi) / (sigma * xi**2)
    i_xx = (
        np.pi**2 / 6.0
        + (1.0 - EULER_GAMMA + 1.0 / xi) ** 2
        - 2.0 * b / xi
        + a / xi**2
    ) / xi**2
    return np.array([[i_mm, i_ms, i_mx], [i_ms, i_ss, i_sx], [i_mx, i_sx, i_xx]])


def _scores_standardized(sigma: float, xi: float, v: np.ndarray):
    """Scores (d/dmu, d/dsigma, d/dxi) at w = exp(v), where z^{-1/xi} ~ Exp(1)."""
    ev = np.exp(v)
    if abs(xi) < 1e-12:
        wstd = -v
        s_mu = (1.0 - ev) / sigma
        s_sg = (-1.0 + wstd * (1.0 - ev)) / sigma
        s_xi = 0.5 * wstd * wstd * (1.0 - ev) - wstd
        return s_mu, s_sg, s_xi
    z = np.exp(-xi * v)
    logz = -xi * v
    wstd = np.expm1(-xi * v) / xi
    zinv = 1.0 / z
    tz = ev * zinv
    s_mu = ((1.0 + xi) * zinv - tz) / sigma
    s_sg = (-1.0 + (1.0 + xi) * wstd * zinv - wstd * tz) / sigma
    s_xi = logz / xi**2 - (1.0 / xi + 1.0) * wstd * zinv + (wstd / xi) * tz - (logz / xi**2) * ev
    return s_mu, s_sg, s_xi


def _information_by_quadrature(sigma: float, xi: float) -> np.ndarray:
    """E[score score'] integrated against the standardized representation.

    Substituting w = z^{-1/xi} ~ Exp(1) and v = log w turns each entry into
    a smooth one-dimensional integral with standard-Gumbel weight.
    """
    # Left tail of the integrand decays like exp((1+2*xi)*v) when xi < 0, so
    # the lower limit must stretch as xi approaches -1/2, capped where
    # z^{-1} = exp(xi*v) would overflow.
    lower = -45.0 / min(1.0, 1.0 + 2.0 * xi)
    if xi < 0:
        lower = max(lower, -700.0 / abs(xi))
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(i, 3):
            def integrand(v, i=i, j=j):
                s = _scores_standardized(sigma, xi, np.asarray(v))
                return s[i] * s[j] * np.exp(v - np.exp(v))
            val = 0.0
            for a_, b_ in ((lower, -8.0), (-8.0, 3.0), (3.0, 30.0)):
                val += quad(integrand, a_, b_, limit=400)[0]
            out[i, j] = out[j, i] = val
    return out


def _transform_jacobian_iid(sigma: float) -> np.ndarray:
    return np.diag([1.0, sigma, 1.0])


def iid_fisher_information(params, n: int, prior: PriorSpec | None = None) -> FisherMetric:
    """3x3 metric on (mu, delta, xi) for n iid observations plus the prior term."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if prior is None:
        prior = iid_default_prior()
    info = n * gev_expected_information(params.sigma, params.xi)
    jac = _transform_jacobian_iid(params.sigma)
    mat = jac @ info @ jac
    v = np.array([params.mu, np.log(params.sigma), params.xi])
    mat += prior.neg_hessian(v)
    return FisherMetric.from_matrix(mat)


def ar_fisher_information(
    model: GevArModel,
    n_obs: int,
    data=None,
    second_moments: str = "exact",
    prior: PriorSpec | None = None,
) -> FisherMetric:
    """(p+3)x(p+3) metric on (mu, theta, delta, eta) for a length-n_obs series.

    ``second_moments`` selects how E[Y_{t-i} Y_{t-j}] is computed: "exact"
    solves the Yule-Walker system; "sample" uses the stationary mean squared
    plus the sample autocovariances of ``data``.
    """
    p = model.p
    n_eff = n_obs - p
    if n_eff < 1:
        raise ValueError("need more observations than the AR order")
    if prior is None:
        prior = ar_default_prior(p)

    base = gev_expected_information(model.sigma, model.xi)
    _, _, mu_y = stationary_moments(model)
    if second_moments == "exact":
        cov = yule_walker_covariances(model)
        second = mu_y**2 + np.array([[cov[abs(i - j)] for j in range(p)] for i in range(p)])
    elif second_moments == "sample":
        if data is None:
            raise ValueError("second_moments='sample' requires the data")
        y = _series_values(data)
        ybar = float(np.mean(y))
        chat = np.array(
            [np.mean((y[: len(y) - k] - ybar) * (y[k:] - ybar)) for k in range(p)]
        )
        second = mu_y**2 + np.array([[chat[abs(i - j)] for j in range(p)] for i in range(p)])
    else:
        raise ValueError(f"unknown second-moment mode {second_moments!r}")

    d = p + 3
    info = np.zeros((d, d))
    info[0, 0] = base[0, 0]
    info[0, 1 : 1 + p] = info[1 : 1 + p, 0] = base[0, 0] * mu_y
    info[1 : 1 + p, 1 : 1 + p] = base[0, 0] * second
    info[0, 1 + p] = info[1 + p, 0] = base[0, 1]
    info[1 : 1 + p, 1 + p] = info[1 + p, 1 : 1 + p] = base[0, 1] * mu_y
    info[0, 2 + p] = info[2 + p, 0] = base[0, 2]
    info[1 : 1 + p, 2 + p] = info[2 + p, 1 : 1 + p] = base[0, 2] * mu_y
    info[1 + p, 1 + p] = base[1, 1]
    info[1 + p, 2 + p] = info[2 + p, 1 + p] = base[1, 2]
    info[2 + p, 2 + p] = base[2, 2]
    info *= n_eff

    s = _sigmoid(eta_from_xi(model.xi))
    jac = np.ones(d)
    jac[1 + p] = model.sigma
    jac[2 + p] = s * (1.0 - s)
    mat = info * np.outer(jac, jac)

    v = np.concatenate([[model.mu], model.theta, [np.log(model.sigma), eta_from_xi(model.xi)]])
    mat += prior.neg_hessian(v)
    return FisherMetric.from_matrix(mat)
