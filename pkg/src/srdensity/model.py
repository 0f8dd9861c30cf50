"""Simple random densities: prior/posterior objects, log-target and likelihood.

The step heights of a simple random density follow a lognormal law conditioned
on the step function integrating to one. The conditional density is written
in the free coordinates ``y = (h_1, ..., h_{k-1})``; the last height is
determined by the constraint. The normalizing constant (density of the
integral functional at 1) is never computed, and the constant contributed by
the base measure is dropped, so ``log_target`` is defined up to an additive
constant.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceSpec, CovMatrix, LognormalParams, induce_sigma
from .errors import DegenerateSupport, InvalidArgument, OutOfDomain
from .partition import CountVector, Partition, complete_heights


@dataclass(frozen=True, eq=False)
class SimpleRandomDensity:
    partition: Partition
    params: LognormalParams

    def __post_init__(self):
        if self.params.k != self.partition.k:
            raise InvalidArgument(
                f"lognormal dimension {self.params.k} does not match {self.partition.k} cells")

    @classmethod
    def from_kernel(cls, partition: Partition, spec: CovarianceSpec, m=1.0) -> "SimpleRandomDensity":
        """Build a prior with constant (or given) log-mean and Gaussian-kernel covariance."""
        cov = induce_sigma(partition, spec)
        m = np.broadcast_to(np.asarray(m, dtype=float), (partition.k,))
        return cls(partition, LognormalParams(m, cov))

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def m(self) -> np.ndarray:
        return self.params.m

    @property
    def cov(self) -> CovMatrix:
        return self.params.cov


def log_target(model: SimpleRandomDensity, y) -> float:
    if model.k == 1:
        raise DegenerateSupport("k = 1: the height vector is fixed, there is nothing to sample")
    h = complete_heights(model.partition, y)
    if np.any(h <= 0):
        return -np.inf
    return model.params.logpdf_unchecked(h)


def log_likelihood(c: CountVector | np.ndarray, h) -> float:
    """Sum of c_i log h_i over cells with positive count."""
    counts = c.as_array() if isinstance(c, CountVector) else np.asarray(c, dtype=float)
    h = np.asarray(h, dtype=float)
    if counts.shape != h.shape:
        raise InvalidArgument(f"{counts.size} counts but {h.size} heights")
    used = counts > 0
    if np.any(h[used] <= 0):
        return -np.inf
    return float(counts[used] @ np.log(h[used]))


def posterior(model: SimpleRandomDensity, c: CountVector) -> SimpleRandomDensity:
    """Conjugate update: same partition and covariance, mean shifted by Sigma @ c."""
    if c.partition != model.partition:
        raise InvalidArgument("counts were computed on a different partition")
    m_star = model.m + model.cov.matvec(c.as_array())
    return SimpleRandomDensity(model.partition, LognormalParams(m_star, model.cov))


def evaluate_density(p: Partition, h, x):
    """Value of the step function with heights ``h`` at ``x`` (scalar or array)."""
    h = np.asarray(h, dtype=float)
    if h.shape != (p.k,):
        raise InvalidArgument(f"expected {p.k} heights, got shape {h.shape}")
    idx = p.cell_index(x)
    out = h[idx]
    return float(out) if np.ndim(out) == 0 else out
