"""Bayesian inference for GEV and GEV-AR(p) models via HMC-family samplers."""

__version__ = "0.1.0"

from .gev import GevParams, gev_cdf, gev_logpdf, gev_loglik, gev_quantile, gev_sample
from .transforms import UnconstrainedVector, inverse_transform, transform
from .priors import PriorSpec, iid_default_prior, ar_default_prior
from .posterior import (
    grad_log_posterior_iid,
    iid_posterior_target,
    log_posterior_iid,
    ar_posterior_target,
)
from .ar import (
    GevArModel,
    TimeSeries,
    ar_grad_loglik,
    ar_loglik,
    forecast,
    simulate_gev_ar,
    stationary_moments,
    yule_walker_covariances,
)
from .fisher import (
    FisherMetric,
    NonPositiveDefiniteError,
    ar_fisher_information,
    gev_expected_information,
    iid_fisher_information,
)
from .samplers import (
    HmcConfig,
    SampleChain,
    hmc_sample,
    leapfrog,
    map_estimate,
    rmhmc_fixed_metric_sample,
    rwm_sample,
)
from .diagnostics import PosteriorSummary, autocorrelation, bias_mse, ess, summarize
