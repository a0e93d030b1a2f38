"""Maps between natural GEV/GEV-AR parameters and unconstrained vectors.

Sampling runs on the real line, so sigma maps to delta = log(sigma) in both
models, and for the AR model the shape is mapped through a centered logistic
eta = logit(xi + 1/2) that keeps xi inside (-1/2, 1/2).  The iid model keeps
xi untransformed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gev import GevParams

IID_TAG = "gev"
AR_TAG = "gev-ar"


@dataclass(frozen=True)
class UnconstrainedVector:
    """Parameter vector on R^d plus the tag naming its parameterization."""

    values: np.ndarray
    model_tag: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.model_tag not in (IID_TAG, AR_TAG):
            raise ValueError(f"unknown model tag {self.model_tag!r}")
        if self.model_tag == IID_TAG and self.values.size != 3:
            raise ValueError("iid GEV vector must have dimension 3")
        if self.model_tag == AR_TAG and self.values.size < 4:
            raise ValueError("GEV-AR vector must have dimension p + 3 >= 4")

    @property
    def dim(self) -> int:
        return self.values.size


def _sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))


def xi_from_eta(eta: float) -> float:
    """Inverse of the centered logistic shape transform, xi in (-1/2, 1/2)."""
    return float(_sigmoid(eta)) - 0.5


def eta_from_xi(xi: float) -> float:
    if not -0.5 < xi < 0.5:
        raise ValueError(f"xi must lie in (-0.5, 0.5), got {xi}")
    return float(np.log(xi + 0.5) - np.log(0.5 - xi))


def transform(params) -> UnconstrainedVector:
    """Map natural parameters to the unconstrained sampling space."""
    from .ar import GevArModel

    if isinstance(params, GevParams):
        vals = np.array([params.mu, np.log(params.sigma), params.xi])
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite transformed values")
        return UnconstrainedVector(vals, IID_TAG)
    if isinstance(params, GevArModel):
        vals = np.concatenate(
            [
                [params.mu],
                params.theta,
                [np.log(params.sigma), eta_from_xi(params.xi)],
            ]
        )
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite transformed values")
        return UnconstrainedVector(vals, AR_TAG)
    raise TypeError(f"cannot transform object of type {type(params).__name__}")


def inverse_transform(v: UnconstrainedVector):
    """Map back to natural parameters; returns (params, log_jacobian).

    The log-Jacobian is that of the inverse map: delta -> sigma contributes
    delta, and for the AR model eta -> xi contributes the log derivative of
    the centered logistic.
    """
    from .ar import GevArModel

    vals = v.values
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite unconstrained values")
    if v.model_tag == IID_TAG:
        mu, delta, xi = vals
        return GevParams(mu, float(np.exp(delta)), xi), float(delta)
    p = vals.size - 3
    mu = vals[0]
    theta = vals[1 : 1 + p].copy()
    delta, eta = vals[1 + p], vals[2 + p]
    s = float(_sigmoid(eta))
    xi = s - 0.5
    log_jac = float(delta + np.log(s) + np.log1p(-s))
    return GevArModel(p=p, mu=float(mu), theta=theta, sigma=float(np.exp(delta)), xi=xi), log_jac


def natural_values(v: UnconstrainedVector) -> np.ndarray:
    """Natural-scale coordinate row for chain storage."""
    vals = v.values
    if v.model_tag == IID_TAG:
        return np.array([vals[0], np.exp(vals[1]), vals[2]])
    p = vals.size - 3
    out = vals.copy()
    out[1 + p] = np.exp(vals[1 + p])
    out[2 + p] = _sigmoid(vals[2 + p]) - 0.5
    return out
