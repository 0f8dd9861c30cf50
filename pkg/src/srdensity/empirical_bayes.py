"""Marginal likelihood of (k, rho) over uniform partitions, and grid maximization.

The marginal likelihood of the data given (k, rho) is the prior expectation of
prod_i h_i^{c_i}. Two estimators are provided:

``prior-mc``
    plain Monte Carlo over thinned prior draws of the step heights, averaged
    in log space. Unusable once the likelihood is much more concentrated than
    the prior (a few hundred observations is enough).
``stepping-stone``
    the same log-mean-exp average taken along a ladder of tempered posteriors
    prior * L^beta. Because the model is conjugate, each tempered posterior is
    again a simple random density with log-mean m + beta * Sigma c, so every
    rung is sampled by the ordinary chain.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .covariance import CovarianceSpec
from .errors import InvalidArgument
from .covariance import LognormalParams
from .model import SimpleRandomDensity
from .partition import count_statistic, uniform_partition
from .sampler import ChainConfig, rwm_sample


def default_theta_rule(k: int, rho: float, a: float = 0.0, b: float = 1.0) -> float:
    """theta = 2 (k / (b - a))^2: adjacent midpoints correlate at exp(-2) for every k."""
    return 2.0 * (k / (b - a)) ** 2


ESTIMATORS = ("stepping-stone", "prior-mc")
WARMUP_FACTOR = 4


def tempering_ladder(n_rungs: int, power: float = 1.0 / 0.3) -> np.ndarray:
    """Increasing exponents 0 = b_0 < ... < b_R = 1, packed near zero."""
    return (np.arange(n_rungs + 1) / n_rungs) ** power


@dataclass(frozen=True)
class EBGrid:
    k_values: Sequence[int]
    rho_values: Sequence[float]
    theta_rule: Callable[..., float] = default_theta_rule
    mc_draws: int = 1000
    seed: int = 0
    a: float = 0.0
    b: float = 1.0
    m_fill: float = 1.0
    burn_in: int = 2000
    thin: int = 10
    estimator: str = "stepping-stone"
    n_rungs: int = 16

    def __post_init__(self):
        ks = tuple(sorted(int(k) for k in self.k_values))
        rhos = tuple(sorted(float(r) for r in self.rho_values))
        if not ks or not rhos:
            raise InvalidArgument("grid axes must be nonempty")
        if ks[0] < 1:
            raise InvalidArgument("k values must be positive")
        if rhos[0] <= 0:
            raise InvalidArgument("rho values must be positive")
        if self.mc_draws < 100:
            raise InvalidArgument("mc_draws must be at least 100")
        if self.estimator not in ESTIMATORS:
            raise InvalidArgument(f"unknown estimator {self.estimator!r}; choose from {ESTIMATORS}")
        if self.n_rungs < 1:
            raise InvalidArgument("n_rungs must be positive")
        if not self.a < self.b:
            raise InvalidArgument("need a < b")
        object.__setattr__(self, "k_values", ks)
        object.__setattr__(self, "rho_values", rhos)

    def theta(self, k: int, rho: float) -> float:
        if self.theta_rule is default_theta_rule:
            return default_theta_rule(k, rho, self.a, self.b)
        return float(self.theta_rule(k, rho))

    def chain_config(self, seed: int, burn_in: int | None = None,
                     step_scale: float | None = None) -> ChainConfig:
        burn_in = self.burn_in if burn_in is None else burn_in
        return ChainConfig(iterations=burn_in + self.mc_draws * self.thin, burn_in=burn_in,
                           thin=self.thin, seed=seed, step_scale=step_scale)

    def point_seed(self, i: int, j: int) -> int:
        ss = np.random.SeedSequence(self.seed, spawn_key=(i, j))
        return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True, eq=False)
class EBResult:
    k_hat: int
    rho_hat: float
    k_values: tuple[int, ...]
    rho_values: tuple[float, ...]
    log_marginals: np.ndarray   # (len(k_values), len(rho_values))
    standard_errors: np.ndarray
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "k_values": list(self.k_values),
            "rho_values": list(self.rho_values),
            "log_marginals": self.log_marginals.tolist(),
            "standard_errors": self.standard_errors.tolist(),
            "k_hat": self.k_hat,
            "rho_hat": self.rho_hat,
            "seed": self.seed,
        }


def log_mean_exp(values) -> tuple[float, float]:
    """log of the mean of exp(values), with its jackknife standard error."""
    v = np.asarray(values, dtype=float)
    s = v.size
    est = float(np.logaddexp.reduce(v) - math.log(s))
    if s < 2:
        return est, math.inf
    # leave-one-out log-sum-exp from prefix/suffix accumulations, no cancellation
    pre = np.concatenate([[-np.inf], np.logaddexp.accumulate(v)[:-1]])
    suf = np.concatenate([np.logaddexp.accumulate(v[::-1])[::-1][1:], [-np.inf]])
    loo = np.logaddexp(pre, suf) - math.log(s - 1)
    se = math.sqrt((s - 1) / s * float(np.sum((loo - loo.mean()) ** 2)))
    return est, se


def marginal_log_likelihood(k: int, rho: float, data, grid: EBGrid,
                            seed: int | None = None) -> tuple[float, float]:
    """Monte Carlo estimate of log p(data | k, rho) and its standard error."""
    p = uniform_partition(grid.a, grid.b, k)
    c = count_statistic(p, data)
    if k == 1 or c.n == 0:
        return -c.n * math.log(grid.b - grid.a), 0.0
    spec = CovarianceSpec(rho, grid.theta(k, rho))
    prior = SimpleRandomDensity.from_kernel(p, spec, grid.m_fill)
    seed = grid.seed if seed is None else seed
    counts = c.as_array()
    used = counts > 0

    def loglik(draws):
        return np.log(draws[:, used]) @ counts[used]

    # the first chain starts cold, with an untuned step, so it gets a longer burn-in
    cold_burn_in = WARMUP_FACTOR * grid.burn_in
    if grid.estimator == "prior-mc":
        chain = rwm_sample(prior, grid.chain_config(seed, burn_in=cold_burn_in))
        return log_mean_exp(loglik(chain.draws))

    betas = tempering_ladder(grid.n_rungs)
    shift = prior.cov.matvec(counts)
    seeds = np.random.SeedSequence(seed).generate_state(grid.n_rungs, dtype=np.uint64)
    total, var = 0.0, 0.0
    start, step = None, None
    for r in range(grid.n_rungs):
        tempered = SimpleRandomDensity(p, LognormalParams(prior.m + betas[r] * shift, prior.cov))
        cfg = grid.chain_config(int(seeds[r]), burn_in=cold_burn_in if r == 0 else None,
                                step_scale=step)
        # each rung continues from where the previous one ended
        chain = rwm_sample(tempered, cfg, init=start)
        ll = loglik(chain.draws)
        est, se = log_mean_exp((betas[r + 1] - betas[r]) * ll)
        total += est
        var += se ** 2
        start, step = chain.draws[-1], chain.final_step_scale
    return total, math.sqrt(var)


def _eval_point(args):
    grid, data, i, j = args
    k, rho = grid.k_values[i], grid.rho_values[j]
    return i, j, marginal_log_likelihood(k, rho, data, grid, seed=grid.point_seed(i, j))


def eb_select(grid: EBGrid, data, n_jobs: int = 1) -> EBResult:
    """Evaluate the marginal likelihood on the full grid and return its argmax.

    Ties go to the smaller k, then the smaller rho.
    """
    data = np.asarray(data, dtype=float).ravel()
    # validate the data once before spending time on chains
    count_statistic(uniform_partition(grid.a, grid.b, 1), data)
    nk, nr = len(grid.k_values), len(grid.rho_values)
    table = np.empty((nk, nr))
    ses = np.empty((nk, nr))
    jobs = [(grid, data, i, j) for i in range(nk) for j in range(nr)]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_eval_point, jobs))
    else:
        results = [_eval_point(job) for job in jobs]
    for i, j, (est, se) in results:
        table[i, j] = est
        ses[i, j] = se
    best = None
    for i in range(nk):
        for j in range(nr):
            if best is None or table[i, j] > table[best]:
                best = (i, j)
    i, j = best
    return EBResult(grid.k_values[i], grid.rho_values[j], grid.k_values, grid.rho_values,
                    table, ses, grid.seed)
