"""Posterior samplers: random-walk Metropolis, HMC, fixed-metric RMHMC.

All samplers operate on the unconstrained coordinates and store draws on
the natural scale.  The Hamiltonian is H(v, p) = -log_post(v) + K(p) with
kinetic energy p' M^{-1} p / 2; proposals follow leapfrog trajectories and
are accepted with probability min[exp(H0 - H1), 1].  A trajectory that
leaves the support (undefined gradient or non-finite position) is flagged
divergent and always rejected, preserving the invariant distribution.

The fixed-metric variant draws momenta from N(0, G) with G the expected
information plus prior curvature evaluated at the MAP; the constant
log-determinant term of the Riemannian Hamiltonian cancels in the
acceptance ratio and is dropped from stored log posteriors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .fisher import FisherMetric
from .posterior import PosteriorTarget
from .transforms import UnconstrainedVector


@dataclass(frozen=True)
class HmcConfig:
    """Step size, trajectory length, mass, and chain-length settings."""

    epsilon: float
    leapfrog_steps: int
    iterations: int
    burn_in: int
    seed: int
    mass: object = 1.0  # scalar mass or FisherMetric / SPD matrix

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError("epsilon must be finite and positive")
        if self.leapfrog_steps < 1:
            raise ValueError("leapfrog_steps must be at least 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must be smaller than iterations")

    def snapshot(self) -> dict:
        mass = self.mass
        if isinstance(mass, FisherMetric):
            mass_desc = {"type": "fisher_metric", "dim": mass.dim}
        elif np.ndim(mass) == 2:
            mass_desc = {"type": "matrix", "dim": int(np.shape(mass)[0])}
        else:
            mass_desc = float(mass)
        return {
            "epsilon": self.epsilon,
            "leapfrog_steps": self.leapfrog_steps,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "mass": mass_desc,
        }


@dataclass
class ChainState:
    """Current position with cached log posterior and gradient."""

    position: np.ndarray
    log_posterior: float
    gradient: np.ndarray


@dataclass
class SampleChain:
    """Retained draws (natural scale, iteration-major) plus run statistics."""

    draws: np.ndarray
    param_names: tuple
    acceptance_rate: float
    divergences: int
    sampler_tag: str
    config: dict
    seed: int
    energy_pairs: np.ndarray | None = None
    accept_flags: np.ndarray | None = None
    accept_per_coord: np.ndarray | None = None

    def __len__(self) -> int:
        return self.draws.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.param_names.index(name)]


class _Mass:
    """Momentum refresh, kinetic energy and M^{-1} p for scalar or matrix mass."""

    def __init__(self, mass, dim: int):
        if isinstance(mass, FisherMetric):
            self.chol = mass.cholesky
            self.scalar = None
        elif np.ndim(mass) == 2:
            self.chol = np.linalg.cholesky(np.asarray(mass, dtype=float))
            self.scalar = None
        else:
            m = float(mass)
            if m <= 0:
                raise ValueError("scalar mass must be positive")
            self.scalar = m
            self.chol = None
        self.dim = dim

    def refresh(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal(self.dim)
        if self.scalar is not None:
            return np.sqrt(self.scalar) * z
        return self.chol @ z

    def kinetic(self, p: np.ndarray) -> float:
        if self.scalar is not None:
            return 0.5 * float(p @ p) / self.scalar
        w = solve_triangular(self.chol, p, lower=True)
        return 0.5 * float(w @ w)

    def inv_mul(self, p: np.ndarray) -> np.ndarray:
        if self.scalar is not None:
            return p / self.scalar
        return cho_solve((self.chol, True), p)


def _resolve_init(init) -> np.ndarray:
    if isinstance(init, UnconstrainedVector):
        return init.values.copy()
    return np.asarray(init, dtype=float).copy()


def leapfrog(position, momentum, gradient_fn, epsilon: float, n_steps: int, mass=1.0):
    """Stormer-Verlet integration of Hamiltonian dynamics.

    Runs ``n_steps`` of momentum half-step, position full-step with M^{-1} p,
    momentum half-step.  Returns (position, momentum, divergent); a divergent
    trajectory is one whose gradient becomes undefined or position
    non-finite, and must be rejected by the caller.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    q = np.asarray(position, dtype=float).copy()
    p = np.asarray(momentum, dtype=float).copy()
    mop = mass if isinstance(mass, _Mass) else _Mass(mass, q.size)
    g = gradient_fn(q)
    if g is None or not np.all(np.isfinite(g)):
        return q, p, True
    for _ in range(n_steps):
        p_half = p + 0.5 * epsilon * g
        q = q + epsilon * mop.inv_mul(p_half)
        if not np.all(np.isfinite(q)):
            return q, p, True
        g = gradient_fn(q)
        if g is None or not np.all(np.isfinite(g)):
            return q, p, True
        p = p_half + 0.5 * epsilon * g
    return q, p, False


def _trajectory(target: PosteriorTarget, state: ChainState, p: np.ndarray, epsilon: float, n_steps: int, mop: _Mass):
    """Fused leapfrog using cached gradients; returns (state*, p*, divergent)."""
    q = state.position
    g = state.gradient
    lp = state.log_posterior
    for _ in range(n_steps):
        p_half = p + 0.5 * epsilon * g
        q = q + epsilon * mop.inv_mul(p_half)
        if not np.all(np.isfinite(q)):
            return None, None, True
        lp, g = target.log_post_and_grad(q)
        if g is None or not np.all(np.isfinite(g)):
            return None, None, True
        p = p_half + 0.5 * epsilon * g
    return ChainState(q, lp, g), p, False


def _run_hmc(target: PosteriorTarget, config: HmcConfig, init, sampler_tag: str) -> SampleChain:
    v0 = _resolve_init(init)
    if v0.size != target.dim:
        raise ValueError(f"init has dimension {v0.size}, expected {target.dim}")
    lp0, g0 = target.log_post_and_grad(v0)
    if not np.isfinite(lp0) or g0 is None:
        raise ValueError("initial position is outside the support")
    rng = np.random.default_rng(config.seed)
    mop = _Mass(config.mass, target.dim)
    state = ChainState(v0, lp0, g0)

    kept = config.iterations - config.burn_in
    draws = np.empty((kept, target.dim))
    energies = np.empty((config.iterations, 2))
    flags = np.zeros(config.iterations, dtype=bool)
    accepted = 0
    divergences = 0
    for i in range(config.iterations):
        p = mop.refresh(rng)
        u = rng.random()
        h0 = -state.log_posterior + mop.kinetic(p)
        new_state, p_new, divergent = _trajectory(target, state, p, config.epsilon, config.leapfrog_steps, mop)
        if divergent:
            divergences += 1
            h1 = np.inf
        else:
            h1 = -new_state.log_posterior + mop.kinetic(p_new)
            if u < np.exp(min(0.0, h0 - h1)):
                state = new_state
                accepted += 1
                flags[i] = True
        energies[i] = (h0, h1)
        if i >= config.burn_in:
            draws[i - config.burn_in] = state.position
    natural = np.empty_like(draws)
    for i in range(kept):
        natural[i] = target.to_natural(draws[i])
    return SampleChain(
        draws=natural,
        param_names=tuple(target.param_names),
        acceptance_rate=accepted / config.iterations,
        divergences=divergences,
        sampler_tag=sampler_tag,
        config=config.snapshot(),
        seed=config.seed,
        energy_pairs=energies,
        accept_flags=flags,
    )


def hmc_sample(target: PosteriorTarget, config: HmcConfig, init) -> SampleChain:
    """Hamiltonian Monte Carlo with momentum refresh every iteration."""
    return _run_hmc(target, config, init, "hmc")


def rmhmc_fixed_metric_sample(target: PosteriorTarget, config: HmcConfig, init) -> SampleChain:
    """HMC with constant mass matrix G fixed at the MAP (metric in config.mass).

    Momenta are drawn from N(0, G) and the kinetic energy is p' G^{-1} p / 2
    through the Cholesky factor; the constant log|G|/2 term cancels in the
    acceptance ratio.  Refuses to start on a non-SPD metric.
    """
    if not isinstance(config.mass, FisherMetric):
        raise ValueError("rmhmc requires config.mass to be a FisherMetric")
    return _run_hmc(target, config, init, "rmhmc")


def rwm_sample(
    target,
    proposal_sds: Sequence[float],
    iterations: int,
    burn_in: int,
    seed: int,
    init,
) -> SampleChain:
    """Componentwise Gaussian random-walk Metropolis on the transformed space.

    One iteration sweeps every coordinate once; each sub-step accepts with
    probability min[1, exp(delta log posterior)].  Out-of-support proposals
    carry -inf log posterior and are rejected automatically.
    """
    sds = np.asarray(proposal_sds, dtype=float)
    if np.any(sds <= 0) or not np.all(np.isfinite(sds)):
        raise ValueError("proposal standard deviations must be positive")
    if not 0 <= burn_in < iterations:
        raise ValueError("burn_in must be smaller than iterations")
    log_post = target.log_post if isinstance(target, PosteriorTarget) else target
    v = _resolve_init(init)
    d = v.size
    if sds.size != d:
        raise ValueError("proposal_sds must match the parameter dimension")
    lp = log_post(v)
    if not np.isfinite(lp):
        raise ValueError("initial position is outside the support")
    rng = np.random.default_rng(seed)
    kept = iterations - burn_in
    draws = np.empty((kept, d))
    accepted = np.zeros(d, dtype=np.int64)
    for i in range(iterations):
        for j in range(d):
            step = sds[j] * rng.standard_normal()
            u = rng.random()
            old = v[j]
            v[j] = old + step
            lp_new = log_post(v)
            if np.isfinite(lp_new) and u < np.exp(min(0.0, lp_new - lp)):
                lp = lp_new
                accepted[j] += 1
            else:
                v[j] = old
        if i >= burn_in:
            draws[i - burn_in] = v
    if isinstance(target, PosteriorTarget):
        natural = np.empty_like(draws)
        for i in range(kept):
            natural[i] = target.to_natural(draws[i])
        names = tuple(target.param_names)
    else:
        natural = draws
        names = tuple(f"x{j}" for j in range(d))
    return SampleChain(
        draws=natural,
        param_names=names,
        acceptance_rate=float(np.sum(accepted)) / (iterations * d),
        divergences=0,
        sampler_tag="mh",
        config={
            "proposal_sds": [float(s) for s in sds],
            "iterations": iterations,
            "burn_in": burn_in,
            "seed": seed,
        },
        seed=seed,
        accept_per_coord=accepted / iterations,
    )


@dataclass
class MapResult:
    """Gradient-ascent endpoint with convergence bookkeeping."""

    values: np.ndarray
    log_posterior: float
    converged: bool
    iterations: int
    grad_norm: float
    line_search_failed: bool = False


def map_estimate(target: PosteriorTarget, init, tolerance: float = 1e-8, max_iters: int = 5000) -> MapResult:
    """Maximize the log posterior by gradient ascent with backtracking.

    Converged when the gradient 2-norm drops below ``tolerance``; otherwise
    stops at ``max_iters`` with converged=False.  If every line-search
    attempt leaves the support the failure is reported with the last valid
    iterate.
    """
    v = _resolve_init(init)
    lp, g = target.log_post_and_grad(v)
    if not np.isfinite(lp) or g is None:
        raise ValueError("initial position is outside the support")
    step = 1.0
    it = 0
    for it in range(1, max_iters + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm < tolerance:
            return MapResult(v, lp, True, it - 1, gnorm)
        g2 = float(g @ g)
        improved = False
        left_support = True
        for _ in range(60):
            v_new = v + step * g
            lp_new, g_new = target.log_post_and_grad(v_new)
            if np.isfinite(lp_new):
                left_support = False
                if lp_new > lp + 1e-4 * step * g2 and g_new is not None:
                    v, lp, g = v_new, lp_new, g_new
                    step *= 2.0
                    improved = True
                    break
            step *= 0.5
        if not improved:
            if left_support:
                return MapResult(v, lp, False, it, float(np.linalg.norm(g)), line_search_failed=True)
            # Step collapsed to rounding level: treat as a stationary point.
            return MapResult(v, lp, float(np.linalg.norm(g)) < tolerance, it, float(np.linalg.norm(g)))
    return MapResult(v, lp, False, max_iters, float(np.linalg.norm(g)))


def tune_rwm_sds(
    target,
    anchor,
    seed: int,
    sds0=None,
    rounds: int = 8,
    sweeps: int = 80,
    band: tuple = (0.2, 0.45),
) -> np.ndarray:
    """Pilot-tune componentwise proposal scales into an acceptance band.

    Short chains run from ``anchor``; each round rescales every coordinate's
    step multiplicatively toward the band midpoint.  Deterministic for a
    fixed seed.
    """
    v0 = _resolve_init(anchor)
    d = v0.size
    sds = np.full(d, 0.1) if sds0 is None else np.asarray(sds0, dtype=float).copy()
    mid = 0.5 * (band[0] + band[1])
    for r in range(rounds):
        chain = rwm_sample(target, sds, sweeps, 0, seed + r, v0)
        acc = chain.accept_per_coord
        if np.all((acc >= band[0]) & (acc <= band[1])):
            break
        sds *= np.exp(1.5 * (acc - mid))
        sds = np.clip(sds, 1e-8, 1e3)
    return sds


def tune_hmc_epsilon(
    target: PosteriorTarget,
    anchor,
    epsilon0: float,
    leapfrog_steps: int,
    seed: int,
    min_accept: float = 0.6,
    max_halvings: int = 6,
    iterations: int = 80,
) -> float:
    """Halve the step size until a short pilot chain accepts often enough."""
    eps = epsilon0
    for _ in range(max_halvings + 1):
        cfg = HmcConfig(
            epsilon=eps,
            leapfrog_steps=leapfrog_steps,
            iterations=iterations,
            burn_in=0,
            seed=seed,
            mass=1.0,
        )
        chain = hmc_sample(target, cfg, anchor)
        if chain.acceptance_rate >= min_accept:
            return eps
        eps *= 0.5
    return eps
