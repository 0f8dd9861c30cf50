"""Gaussian-kernel covariance matrices over partition midpoints and lognormal densities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidArgument, NumericalInstability
from .partition import Partition

LOG_2PI = float(np.log(2.0 * np.pi))

# multiples of rho added to the diagonal, tried in order
JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)


@dataclass(frozen=True)
class CovarianceSpec:
    rho: float
    theta: float

    def __post_init__(self):
        if not (self.rho > 0 and np.isfinite(self.rho)):
            raise InvalidArgument(f"rho must be positive, got {self.rho!r}")
        if not (self.theta > 0 and np.isfinite(self.theta)):
            raise InvalidArgument(f"theta must be positive, got {self.theta!r}")

    def kernel(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.rho * np.exp(-self.theta * (x - y) ** 2)


def gaussian_cov(spec: CovarianceSpec, x: float, y: float) -> float:
    return float(spec.kernel(x, y))


@dataclass(frozen=True, eq=False)
class CovMatrix:
    entries: np.ndarray
    chol: np.ndarray
    logdet: float
    jitter_applied: float = 0.0

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_matrix(cls, entries, ladder=JITTER_LADDER, scale: float | None = None) -> "CovMatrix":
        """Factorize a symmetric matrix, adding diagonal jitter from ``ladder`` if needed.

        Jitter rungs are multiplied by ``scale`` (defaults to the mean diagonal).
        """
        entries = np.array(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidArgument("covariance must be a square matrix")
        entries = 0.5 * (entries + entries.T)
        if scale is None:
            scale = float(np.mean(np.diag(entries)))
        eye = np.eye(entries.shape[0])
        for rung in ladder:
            jitter = rung * scale
            try:
                chol = np.linalg.cholesky(entries + jitter * eye)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(chol)) or np.any(np.diag(chol) <= 0):
                continue
            logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
            entries.flags.writeable = False
            chol.flags.writeable = False
            return cls(entries, chol, logdet, float(jitter))
        raise NumericalInstability(
            f"Cholesky failed for a {entries.shape[0]}x{entries.shape[0]} covariance "
            f"even with jitter {ladder[-1] * scale:g}")

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """(entries + jitter I) @ v, i.e. the product with the matrix actually factorized."""
        return self.entries @ v + self.jitter_applied * v

    def solve_lower(self, z: np.ndarray) -> np.ndarray:
        """L^{-1} z for the lower Cholesky factor L."""
        return solve_triangular(self.chol, z, lower=True, check_finite=False)

    def quad_form(self, z: np.ndarray) -> float:
        """z^T Sigma^{-1} z (with the jitter that was applied)."""
        w = self.solve_lower(z)
        return float(w @ w)


def induce_sigma(p: Partition, spec: CovarianceSpec) -> CovMatrix:
    mid = p.midpoints
    entries = spec.kernel(mid[:, None], mid[None, :])
    try:
        return CovMatrix.from_matrix(entries, scale=spec.rho)
    except NumericalInstability as exc:
        raise NumericalInstability(
            f"{exc} (k={p.k}, rho={spec.rho!r}, theta={spec.theta!r})") from None


@dataclass(frozen=True, eq=False)
class LognormalParams:
    m: np.ndarray
    cov: CovMatrix
    _norm: float = field(init=False, repr=False)

    def __post_init__(self):
        m = np.array(self.m, dtype=float).ravel()
        if m.shape != (self.cov.dim,):
            raise InvalidArgument(f"mean has length {m.size}, covariance has dim {self.cov.dim}")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "_norm", -0.5 * m.size * LOG_2PI - 0.5 * self.cov.logdet)

    @property
    def k(self) -> int:
        return self.m.size

    def logpdf_unchecked(self, u: np.ndarray) -> float:
        # assumes every u_i > 0
        logu = np.log(u)
        w = self.cov.solve_lower(logu - self.m)
        return self._norm - float(logu.sum()) - 0.5 * float(w @ w)


def lognormal_logpdf(params: LognormalParams, u) -> float:
    """Log density of the multivariate lognormal; -inf off the positive orthant."""
    u = np.asarray(u, dtype=float)
    if u.shape != (params.k,):
        raise InvalidArgument(f"expected {params.k} values, got shape {u.shape}")
    if np.any(u <= 0):
        return -np.inf
    return params.logpdf_unchecked(u)
