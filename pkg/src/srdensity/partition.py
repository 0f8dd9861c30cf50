"""Partitions of a bounded interval and the quantities built on them.

A partition of ``[a, b]`` into ``k`` cells uses half-open cells
``[t_{i-1}, t_i)`` except for the last, which is closed on the right.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, OutOfDomain


@dataclass(frozen=True)
class Partition:
    knots: tuple[float, ...]

    def __post_init__(self):
        knots = tuple(float(t) for t in self.knots)
        if len(knots) < 2:
            raise InvalidArgument("a partition needs at least two knots")
        if not np.all(np.isfinite(knots)):
            raise InvalidArgument("knots must be finite")
        if np.any(np.diff(knots) <= 0):
            raise InvalidArgument("knots must be strictly increasing")
        object.__setattr__(self, "knots", knots)

    @property
    def a(self) -> float:
        return self.knots[0]

    @property
    def b(self) -> float:
        return self.knots[-1]

    @property
    def k(self) -> int:
        return len(self.knots) - 1

    @cached_property
    def knot_array(self) -> np.ndarray:
        arr = np.array(self.knots)
        arr.flags.writeable = False
        return arr

    @cached_property
    def widths(self) -> np.ndarray:
        d = np.diff(self.knot_array)
        d.flags.writeable = False
        return d

    @cached_property
    def midpoints(self) -> np.ndarray:
        t = self.knot_array
        mid = 0.5 * (t[:-1] + t[1:])
        mid.flags.writeable = False
        return mid

    def cell_index(self, xs) -> np.ndarray:
        """Zero-based cell index of each point; raises if any point is outside [a, b]."""
        xs = np.asarray(xs, dtype=float)
        bad = (xs < self.a) | (xs > self.b) | ~np.isfinite(xs)
        if np.any(bad):
            first = xs[bad].flat[0]
            raise OutOfDomain(f"value {first!r} lies outside [{self.a!r}, {self.b!r}]")
        idx = np.searchsorted(self.knot_array, xs, side="right") - 1
        return np.minimum(idx, self.k - 1)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "k": self.k, "knots": list(self.knots)}


@dataclass(frozen=True)
class CountVector:
    """Per-cell counts of a sample, tied to the partition that produced them."""

    counts: tuple[int, ...]
    partition: Partition

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != self.partition.k:
            raise InvalidArgument(
                f"{len(counts)} counts for a partition with {self.partition.k} cells")
        if any(c < 0 for c in counts):
            raise InvalidArgument("counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=float)

    def __add__(self, other: "CountVector") -> "CountVector":
        if other.partition != self.partition:
            raise InvalidArgument("cannot add counts from different partitions")
        return CountVector(tuple(x + y for x, y in zip(self.counts, other.counts)), self.partition)


def uniform_partition(a: float, b: float, k: int) -> Partition:
    """Partition of ``[a, b]`` into ``k`` cells of equal width."""
    if not a < b:
        raise InvalidArgument(f"need a < b, got a={a!r}, b={b!r}")
    if int(k) != k or k < 1:
        raise InvalidArgument(f"k must be a positive integer, got {k!r}")
    k = int(k)
    knots = [a + i * (b - a) / k for i in range(k)] + [b]
    return Partition(tuple(knots))


def count_statistic(p: Partition, xs: Sequence[float]) -> CountVector:
    xs = np.asarray(xs, dtype=float).ravel()
    idx = p.cell_index(xs)
    counts = np.bincount(idx, minlength=p.k)
    return CountVector(tuple(counts.tolist()), p)


def s_delta(p: Partition, u) -> float:
    """Integral of the step function with heights ``u``: sum of d_i u_i."""
    u = np.asarray(u, dtype=float)
    if u.shape != (p.k,):
        raise InvalidArgument(f"expected {p.k} heights, got shape {u.shape}")
    return float(p.widths @ u)


def complete_heights(p: Partition, y) -> np.ndarray:
    """Append the last height so that the step function integrates to one.

    The result may have a nonpositive last entry; callers decide what that means.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.shape != (p.k - 1,):
        raise InvalidArgument(f"expected {p.k - 1} free heights, got {y.shape[0]}")
    d = p.widths
    last = (1.0 - float(d[:-1] @ y)) / d[-1]
    return np.append(y, last)


def in_h1(p: Partition, h, tol: float = 1e-8) -> bool:
    """Whether ``h`` is a valid density: nonnegative and integrating to one."""
    h = np.asarray(h, dtype=float)
    return h.shape == (p.k,) and bool(np.all(h >= 0)) and abs(s_delta(p, h) - 1.0) <= tol
