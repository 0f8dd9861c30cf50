"""Synthetic data generators and their reference distributions (all on [0, 1])."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, stats

from .errors import InvalidArgument

_E2 = math.exp(2.0)


def trunc_exp_pdf(x):
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x <= 1)
    return np.where(inside, 2.0 * np.exp(-2.0 * (x - 1.0)) / (_E2 - 1.0), 0.0)


def trunc_exp_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return (_E2 - np.exp(2.0 - 2.0 * x)) / (_E2 - 1.0)


def trunc_exp_ppf(u):
    u = np.asarray(u, dtype=float)
    return 1.0 - 0.5 * np.log(_E2 - u * (_E2 - 1.0))


@dataclass(frozen=True)
class Reference:
    """A distribution on [0, 1] with sampler, density, CDF and quantile function."""

    name: str
    sample: Callable[[np.random.Generator, int], np.ndarray]
    pdf: Callable
    cdf: Callable
    ppf: Callable | None = None

    def quantiles(self, probs) -> np.ndarray:
        probs = np.asarray(probs, dtype=float)
        if self.ppf is not None:
            return np.asarray(self.ppf(probs), dtype=float)
        return np.array([optimize.brentq(lambda x: float(self.cdf(x)) - p, 0.0, 1.0, xtol=1e-14)
                         for p in probs.ravel()]).reshape(probs.shape)


def _mixture(components, weights):
    weights = np.asarray(weights, dtype=float)

    def pdf(x):
        return sum(w * c.pdf(x) for w, c in zip(weights, components))

    def cdf(x):
        return sum(w * c.cdf(x) for w, c in zip(weights, components))

    return pdf, cdf


def _beta_mixture_ex1():
    comps = [stats.beta(1, 10), stats.beta(10, 10), stats.beta(30, 5)]
    w = [1 / 3, 1 / 3, 1 / 3]
    pdf, cdf = _mixture(comps, w)

    def sample(rng, n):
        comp = rng.integers(0, 3, size=n)
        a = np.array([1.0, 10.0, 30.0])[comp]
        b = np.array([10.0, 10.0, 5.0])[comp]
        return rng.beta(a, b)

    return Reference("beta-mixture-ex1", sample, pdf, cdf)


def _beta42():
    d = stats.beta(4, 2)
    return Reference("beta42", lambda rng, n: rng.beta(4.0, 2.0, size=n), d.pdf, d.cdf, d.ppf)


def _trunc_exp():
    return Reference("trunc-exp", lambda rng, n: trunc_exp_ppf(rng.random(n)),
                     trunc_exp_pdf, trunc_exp_cdf, trunc_exp_ppf)


def _triangular():
    d = stats.triang(c=0.5, loc=0.0, scale=1.0)
    return Reference("triangular", lambda rng, n: rng.triangular(0.0, 0.5, 1.0, size=n),
                     d.pdf, d.cdf, d.ppf)


def _trunc_normal_mixture():
    locs, scales, w = np.array([0.3, 0.7]), np.array([0.1, 0.1]), np.array([0.5, 0.5])
    mass = float(sum(wi * (stats.norm(l, s).cdf(1) - stats.norm(l, s).cdf(0))
                     for wi, l, s in zip(w, locs, scales)))

    def pdf(x):
        x = np.asarray(x, dtype=float)
        val = sum(wi * stats.norm(l, s).pdf(x) for wi, l, s in zip(w, locs, scales)) / mass
        return np.where((x >= 0) & (x <= 1), val, 0.0)

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return sum(wi * (stats.norm(l, s).cdf(x) - stats.norm(l, s).cdf(0))
                   for wi, l, s in zip(w, locs, scales)) / mass

    def sample(rng, n):
        out = np.empty(0)
        while out.size < n:
            m = 2 * (n - out.size) + 16
            comp = rng.choice(2, size=m, p=w)
            draws = rng.normal(locs[comp], scales[comp])
            out = np.concatenate([out, draws[(draws >= 0) & (draws <= 1)]])
        return out[:n]

    return Reference("trunc-normal-mixture", sample, pdf, cdf)


REFERENCES: dict[str, Callable[[], Reference]] = {
    "beta-mixture-ex1": _beta_mixture_ex1,
    "beta42": _beta42,
    "trunc-exp": _trunc_exp,
    "triangular": _triangular,
    "trunc-normal-mixture": _trunc_normal_mixture,
}


def get_reference(name: str) -> Reference:
    try:
        return REFERENCES[name]()
    except KeyError:
        raise InvalidArgument(f"unknown generator {name!r}; choose from {sorted(REFERENCES)}") from None


def gen_data(name: str, n: int, seed: int = 0) -> np.ndarray:
    if n < 0:
        raise InvalidArgument("n must be nonnegative")
    ref = get_reference(name)
    return ref.sample(np.random.default_rng(seed), int(n))
