"""Random walk Metropolis over the constraint hyperplane, and chain summaries.

The chain lives on the free coordinates y = (h_1, ..., h_{k-1}); the last
height is completed from the integral constraint and proposals that leave the
positive orthant are rejected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .model import SimpleRandomDensity
from .partition import Partition, in_h1

_CHUNK = 8192


@dataclass(frozen=True)
class ChainConfig:
    iterations: int = 100_000
    burn_in: int = 20_000
    thin: int = 10
    step_scale: float | None = None  # None: 0.05 / (b - a)
    seed: int = 0
    adapt: bool = True
    target_acceptance: float = 0.25

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidArgument("iterations must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise InvalidArgument("need 0 <= burn_in < iterations")
        if self.thin < 1:
            raise InvalidArgument("thin must be positive")
        if self.step_scale is not None and not self.step_scale > 0:
            raise InvalidArgument("step_scale must be positive")
        if not 0 < self.target_acceptance < 1:
            raise InvalidArgument("target_acceptance must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")

    @property
    def n_draws(self) -> int:
        return -(-(self.iterations - self.burn_in) // self.thin)


@dataclass(frozen=True, eq=False)
class ChainOutput:
    draws: np.ndarray          # (n_draws, k), every row in H_1
    acceptance_rate: float     # over post-burn-in iterations
    final_step_scale: float
    seed: int
    n_accepted: int = 0
    n_proposed: int = 0

    def __len__(self) -> int:
        return self.draws.shape[0]


@dataclass(frozen=True, eq=False)
class CredibleBand:
    center: np.ndarray
    epsilon: float
    gamma: float

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.epsilon

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.epsilon

    def coverage(self, chain: ChainOutput) -> float:
        """Fraction of draws within sup-distance epsilon of the center."""
        s = sup_deviations(chain, self.center)
        return float(np.mean(s <= self.epsilon))


def rwm_sample(model: SimpleRandomDensity, cfg: ChainConfig, init=None) -> ChainOutput:
    """Run the chain. It starts at the uniform density unless ``init`` heights are given."""
    p = model.partition
    k = p.k
    step = cfg.step_scale if cfg.step_scale is not None else 0.05 / (p.b - p.a)
    if k == 1:
        draws = np.full((cfg.n_draws, 1), 1.0 / (p.b - p.a))
        n_post = cfg.iterations - cfg.burn_in
        return ChainOutput(draws, 1.0, float(step), cfg.seed, n_post, n_post)

    rng = np.random.default_rng(cfg.seed)
    d = p.widths
    d_free, d_last = d[:-1], d[-1]
    params = model.params

    def logpi(y):
        last = (1.0 - float(d_free @ y)) / d_last
        if last <= 0 or np.any(y <= 0):
            return -math.inf, last
        h = np.append(y, last)
        return params.logpdf_unchecked(h), last

    if init is None:
        y = np.full(k - 1, 1.0 / (p.b - p.a))
    else:
        init = np.asarray(init, dtype=float)
        if init.shape != (k,) or not in_h1(p, init) or np.any(init <= 0):
            raise InvalidArgument("init must be strictly positive heights integrating to one")
        y = init[:-1].copy()
    lp, last = logpi(y)
    draws = np.empty((cfg.n_draws, k))
    n_stored = 0
    window_acc = 0
    n_acc_post = 0
    it = 0
    while it < cfg.iterations:
        n = min(_CHUNK, cfg.iterations - it)
        noise = rng.standard_normal((n, k - 1))
        log_u = np.log(rng.random(n))
        for j in range(n):
            prop = y + step * noise[j]
            lp_prop, last_prop = logpi(prop)
            if lp_prop - lp >= log_u[j]:
                y, lp, last = prop, lp_prop, last_prop
                accepted = True
            else:
                accepted = False
            if it < cfg.burn_in:
                window_acc += accepted
                if cfg.adapt and (it + 1) % 100 == 0:
                    if window_acc / 100.0 > cfg.target_acceptance:
                        step *= 1.1
                    else:
                        step /= 1.1
                    window_acc = 0
            else:
                n_acc_post += accepted
                if (it - cfg.burn_in) % cfg.thin == 0:
                    draws[n_stored, :-1] = y
                    draws[n_stored, -1] = last
                    n_stored += 1
            it += 1
    n_post = cfg.iterations - cfg.burn_in
    return ChainOutput(draws, n_acc_post / n_post, float(step), cfg.seed, n_acc_post, n_post)


def posterior_mean(chain: ChainOutput) -> np.ndarray:
    """Ergodic mean of the stored heights; this is the predictive density's step heights."""
    if len(chain) == 0:
        raise InvalidArgument("empty chain")
    return chain.draws.mean(axis=0)


def sup_deviations(chain: ChainOutput, center) -> np.ndarray:
    center = np.asarray(center, dtype=float)
    if center.shape != chain.draws.shape[1:]:
        raise InvalidArgument(f"center has shape {center.shape}, draws have {chain.draws.shape[1:]}")
    return np.max(np.abs(chain.draws - center), axis=1)


def credible_band(chain: ChainOutput, center, gamma: float) -> CredibleBand:
    """Sup-norm ball around ``center`` holding a fraction ``gamma`` of the draws.

    epsilon is the ceil(gamma * N)-th smallest sup deviation, i.e. the
    smallest draw-realized radius whose (closed) ball covers at least gamma.
    """
    if not 0 < gamma < 1:
        raise InvalidArgument(f"gamma must lie in (0, 1), got {gamma!r}")
    if len(chain) == 0:
        raise InvalidArgument("empty chain")
    s = np.sort(sup_deviations(chain, center))
    idx = math.ceil(gamma * s.size) - 1
    return CredibleBand(np.asarray(center, dtype=float).copy(), float(s[idx]), float(gamma))


@dataclass(frozen=True, eq=False)
class StepCDF:
    """Continuous piecewise-linear CDF of a step density, breakpoints at the knots."""

    partition: Partition
    heights: np.ndarray
    values: np.ndarray  # F at each knot

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, self.partition.knot_array, self.values)

    def ppf(self, probs) -> np.ndarray:
        probs = np.asarray(probs, dtype=float)
        if np.any((probs < 0) | (probs > 1)):
            raise InvalidArgument("probabilities must lie in [0, 1]")
        t = self.partition.knot_array
        F = self.values
        j = np.searchsorted(F, probs, side="left")
        j = np.clip(j, 1, len(t) - 1)
        cell = j - 1
        h = self.heights[cell]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = t[cell] + np.where(h > 0, (probs - F[cell]) / h, 0.0)
        q = np.clip(q, t[cell], t[cell + 1])
        return np.where(probs <= 0, t[0], q)


def cdf_and_quantiles(p: Partition, h, probs) -> tuple[StepCDF, np.ndarray]:
    h = np.asarray(h, dtype=float)
    if not in_h1(p, h):
        raise InvalidArgument("heights must be nonnegative and integrate to one")
    F = np.concatenate([[0.0], np.cumsum(p.widths * h)])
    F[-1] = 1.0
    F = np.minimum(F, 1.0)
    cdf = StepCDF(p, h.copy(), F)
    return cdf, cdf.ppf(probs)
