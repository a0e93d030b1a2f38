"""Per-coordinate priors and their derivatives on the sampling scale.

Priors declared on the natural scale of a log- or logit-mapped coordinate
pick up the log-Jacobian of the inverse map, so ``log_prior`` always returns
the density of the transformed coordinate.  All coordinates are a priori
independent, hence gradients and curvatures are diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma

import numpy as np

from .transforms import AR_TAG, IID_TAG, _sigmoid


def _softplus(x: float) -> float:
    return float(np.log1p(np.exp(-abs(x))) + max(x, 0.0))


@dataclass(frozen=True)
class NormalPrior:
    variance: float = 25.0


@dataclass(frozen=True)
class InverseGammaPrior:
    shape: float
    rate: float


@dataclass(frozen=True)
class UniformPrior:
    lo: float
    hi: float


# Kind of map applied to each coordinate of the unconstrained vector.
def _coordinate_maps(model_tag: str, dim: int) -> list[str]:
    if model_tag == IID_TAG:
        return ["identity", "log", "identity"]
    p = dim - 3
    return ["identity"] * (1 + p) + ["log", "logit"]


def _coord_terms(prior, scale: str, cmap: str, v: float) -> tuple[float, float, float]:
    """(log density, gradient, curvature) of one transformed coordinate."""
    if isinstance(prior, NormalPrior):
        if cmap != "identity" and scale != "transformed":
            raise ValueError("normal priors on mapped coordinates must be declared on the transformed scale")
        tau2 = prior.variance
        return (-0.5 * v * v / tau2 - 0.5 * np.log(2.0 * np.pi * tau2), -v / tau2, -1.0 / tau2)
    if isinstance(prior, InverseGammaPrior):
        if scale != "natural" or cmap != "log":
            raise ValueError("inverse-gamma priors are supported on the natural scale of a log coordinate")
        a, b = prior.shape, prior.rate
        const = a * np.log(b) - lgamma(a)
        ebv = np.exp(-v)
        return (const - a * v - b * ebv, -a + b * ebv, -b * ebv)
    if isinstance(prior, UniformPrior):
        if scale != "natural" or cmap != "logit" or (prior.lo, prior.hi) != (-0.5, 0.5):
            raise ValueError("uniform priors are supported as U(-0.5, 0.5) on the logit coordinate")
        s = float(_sigmoid(v))
        # log s + log(1-s) via softplus to stay finite-safe for large |v|
        logp = -_softplus(-v) - _softplus(v)
        return (logp, 1.0 - 2.0 * s, -2.0 * s * (1.0 - s))
    raise TypeError(f"unknown prior {prior!r}")


@dataclass(frozen=True)
class PriorSpec:
    """Ordered per-coordinate priors for one model parameterization."""

    coords: tuple
    model_tag: str

    def __post_init__(self):
        _coordinate_maps(self.model_tag, len(self.coords))  # validates tag/length

    @property
    def dim(self) -> int:
        return len(self.coords)

    def _terms(self, v: np.ndarray):
        v = np.asarray(v, dtype=float)
        if v.size != self.dim:
            raise ValueError(f"expected vector of dimension {self.dim}, got {v.size}")
        maps = _coordinate_maps(self.model_tag, self.dim)
        return [
            _coord_terms(prior, scale, cmap, float(x))
            for (prior, scale), cmap, x in zip(self.coords, maps, v)
        ]

    def log_prior(self, v) -> float:
        return float(sum(t[0] for t in self._terms(v)))

    def grad_log_prior(self, v) -> np.ndarray:
        return np.array([t[1] for t in self._terms(v)])

    def curvature(self, v) -> np.ndarray:
        """Second derivative of the log prior per transformed coordinate."""
        return np.array([t[2] for t in self._terms(v)])

    def neg_hessian(self, v) -> np.ndarray:
        return np.diag(-self.curvature(v))


def iid_default_prior(variance: float = 25.0) -> PriorSpec:
    """Independent N(0, variance) on each of (mu, log sigma, xi)."""
    n = NormalPrior(variance)
    return PriorSpec(
        coords=((n, "transformed"), (n, "transformed"), (n, "transformed")),
        model_tag=IID_TAG,
    )


def ar_default_prior(p: int) -> PriorSpec:
    """N(0,25) on mu and each theta, IG(0.1, 0.001) on sigma, U(-1/2, 1/2) on xi."""
    n = NormalPrior(25.0)
    coords = [(n, "natural")] * (1 + p)
    coords.append((InverseGammaPrior(0.1, 0.001), "natural"))
    coords.append((UniformPrior(-0.5, 0.5), "natural"))
    return PriorSpec(coords=tuple(coords), model_tag=AR_TAG)
