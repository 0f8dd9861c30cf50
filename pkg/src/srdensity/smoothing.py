"""Smooth Bayes estimates as Bernstein (Beta-density) mixtures.

Under squared L2 loss the Bayes decision within the mixtures sum_i alpha_i g_i,
alpha on the probability simplex, minimizes

    Q(alpha) = alpha^T M alpha - J^T alpha,

with M the Gram matrix of the basis and J_i = 2 * integral of g_i times the
expected random density. Here g_i is the Beta(i + 1, N - i + 1) density,
i = 0..N, on [0, 1]; other supports are mapped affinely onto [0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .errors import InvalidArgument
from .partition import Partition, in_h1
from .special import regularized_incomplete_beta

MAX_DEGREE = 500
DEFAULT_DEGREE = 30


@dataclass(frozen=True)
class BernsteinBasis:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidArgument(f"degree must be a positive integer, got {self.N!r}")
        if self.N > MAX_DEGREE:
            raise InvalidArgument(f"degree {self.N} exceeds the supported maximum {MAX_DEGREE}")

    @property
    def size(self) -> int:
        return self.N + 1

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return [(i + 1, self.N - i + 1) for i in range(self.size)]

    @cached_property
    def _log_norm(self) -> np.ndarray:
        # -log B(i + 1, N - i + 1)
        i = np.arange(self.size)
        return gammaln(self.N + 2) - gammaln(i + 1) - gammaln(self.N - i + 1)

    def densities(self, x) -> np.ndarray:
        """Matrix of g_i(x), shape (len(x), N + 1); zero outside [0, 1]."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        i = np.arange(self.size)
        inside = (x >= 0) & (x <= 1)
        xc = np.clip(x, 0.0, 1.0)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            logx = np.where(i == 0, 0.0, i * np.log(xc))
            log1mx = np.where(i == self.N, 0.0, (self.N - i) * np.log1p(-xc))
        out = np.exp(self._log_norm + logx + log1mx)
        out[~inside] = 0.0
        return out


@dataclass(frozen=True, eq=False)
class QPProblem:
    M: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        J = np.asarray(self.J, dtype=float).ravel()
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != J.size:
            raise InvalidArgument(f"incompatible shapes M{M.shape}, J{J.shape}")
        if not np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, np.abs(M).max())):
            raise InvalidArgument("M must be symmetric")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "J", J)

    def objective(self, alpha) -> float:
        alpha = np.asarray(alpha, dtype=float)
        return float(alpha @ self.M @ alpha - self.J @ alpha)

    def gradient(self, alpha) -> np.ndarray:
        return 2.0 * (self.M @ alpha) - self.J


@dataclass(frozen=True, eq=False)
class MixtureDensity:
    basis: BernsteinBasis
    weights: np.ndarray
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size != self.basis.size:
            raise InvalidArgument(f"{w.size} weights for a basis of size {self.basis.size}")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidArgument("weights must be nonnegative and sum to one")
        object.__setattr__(self, "weights", w)

    def __call__(self, x):
        return evaluate_mixture(self, x)

    def to_dict(self) -> dict:
        return {"N": self.basis.N, "a": self.a, "b": self.b, "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "MixtureDensity":
        return cls(BernsteinBasis(int(d["N"])), np.asarray(d["weights"], dtype=float),
                   float(d.get("a", 0.0)), float(d.get("b", 1.0)))


def overlap_matrix(N: int) -> np.ndarray:
    """Gram matrix M_ij = integral of g_i g_j over [0, 1], in closed form."""
    basis = BernsteinBasis(N)
    i = np.arange(N + 1)
    I, J = np.meshgrid(i, i, indexing="ij")
    # log B(i + j + 1, 2N - i - j + 1)
    log_num = gammaln(I + J + 1) + gammaln(2 * N - I - J + 1) - gammaln(2 * N + 2)
    M = np.exp(log_num + basis._log_norm[:, None] + basis._log_norm[None, :])
    return 0.5 * (M + M.T)


def _to_unit(p: Partition, h_bar) -> tuple[np.ndarray, np.ndarray]:
    t = (p.knot_array - p.a) / (p.b - p.a)
    t[0], t[-1] = 0.0, 1.0
    return t, np.asarray(h_bar, dtype=float) * (p.b - p.a)


def moment_vector(basis: BernsteinBasis, p: Partition, h_bar) -> np.ndarray:
    """J_i = 2 * integral of g_i times the step density with heights ``h_bar``."""
    h_bar = np.asarray(h_bar, dtype=float)
    if not in_h1(p, h_bar):
        raise InvalidArgument("h_bar must be nonnegative and integrate to one")
    t, h = _to_unit(p, h_bar)
    J = np.empty(basis.size)
    for i, (sa, sb) in enumerate(basis.shapes):
        cdf = np.array([regularized_incomplete_beta(float(x), sa, sb) for x in t])
        J[i] = 2.0 * float(h @ np.diff(cdf))
    return J


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    r = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[r] / (r + 1.0)
    return np.maximum(v - tau, 0.0)


def kkt_residual(prob: QPProblem, alpha, support_tol: float = 1e-12) -> float:
    """Largest violation of the simplex-QP optimality conditions at ``alpha``.

    With g = 2 M alpha - J and mu the mean of g over the support, the
    multipliers are lambda = g - mu; they must vanish on the support and be
    nonnegative off it.
    """
    alpha = np.asarray(alpha, dtype=float)
    g = prob.gradient(alpha)
    support = alpha > support_tol
    if not np.any(support):
        return math.inf
    mu = g[support].mean()
    lam = g - mu
    parts = [np.abs(lam[support]).max(), abs(alpha.sum() - 1.0), max(0.0, -alpha.min())]
    if np.any(~support):
        parts.append(max(0.0, -lam[~support].min()))
    return float(max(parts))


def _largest_eigenvalue(M: np.ndarray, iters: int = 200) -> float:
    v = np.ones(M.shape[0]) / math.sqrt(M.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = M @ v
        lam_new = float(np.linalg.norm(w))
        v = w / lam_new
        if abs(lam_new - lam) <= 1e-12 * lam_new:
            break
        lam = lam_new
    # power iteration approaches from below; pad so 1/L stays a valid step
    return lam_new * 1.01


def _polish(prob: QPProblem, alpha: np.ndarray) -> np.ndarray | None:
    # solve the equality-constrained problem on the current support exactly
    support = np.nonzero(alpha > 1e-10)[0]
    s = support.size
    K = np.zeros((s + 1, s + 1))
    K[:s, :s] = 2.0 * prob.M[np.ix_(support, support)]
    K[:s, s] = -1.0
    K[s, :s] = 1.0
    rhs = np.append(prob.J[support], 1.0)
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        return None
    if np.any(sol[:s] < 0):
        return None
    out = np.zeros_like(alpha)
    out[support] = sol[:s]
    out /= out.sum()
    return out


def solve_simplex_qp(prob: QPProblem, tol: float = 1e-9, max_iter: int = 100_000,
                     basis: BernsteinBasis | None = None) -> MixtureDensity:
    """Global minimizer of alpha^T M alpha - J^T alpha over the probability simplex.

    Accelerated projected gradient with adaptive restart, followed by an
    exact solve on the detected support when that improves the KKT residual.
    """
    # Gram matrices of high-degree bases are singular to working precision, so only
    # reject matrices that are indefinite beyond round-off
    eig = np.linalg.eigvalsh(prob.M)
    if eig[-1] <= 0 or eig[0] < -1e-10 * eig[-1]:
        raise InvalidArgument("M is not positive definite")
    n = prob.J.size
    L = 2.0 * _largest_eigenvalue(prob.M)
    x = np.full(n, 1.0 / n)
    z = x.copy()
    t = 1.0
    for it in range(1, max_iter + 1):
        if it % 500 == 0:
            if kkt_residual(prob, x) < tol:
                break
            # the support usually settles long before the iterate converges
            polished = _polish(prob, x)
            if polished is not None and kkt_residual(prob, polished) < tol:
                x = polished
                break
        x_new = project_simplex(z - prob.gradient(z) / L)
        if L * np.linalg.norm(x_new - z) < tol:
            x = x_new
            break
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        if prob.objective(x_new) > prob.objective(x):
            # restart momentum
            t_new = 1.0
            z = x_new
        else:
            z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
    if kkt_residual(prob, x) >= tol:
        polished = _polish(prob, x)
        if polished is not None and kkt_residual(prob, polished) < kkt_residual(prob, x):
            x = polished
    x = np.maximum(x, 0.0)
    x /= x.sum()
    if basis is None:
        basis = BernsteinBasis(n - 1)
    return MixtureDensity(basis, x)


def bernstein_weights_of(f_values) -> np.ndarray:
    """Weights making sum_i alpha_i g_i the degree-N Bernstein polynomial of f.

    ``f_values`` holds f(i / N) for i = 0..N. The weights need not sum to one.
    """
    f = np.asarray(f_values, dtype=float).ravel()
    N = f.size - 1
    if N < 1:
        raise InvalidArgument("need at least two function values")
    i = np.arange(N + 1)
    log_binom = gammaln(N + 1) - gammaln(i + 1) - gammaln(N - i + 1)
    log_beta = gammaln(i + 1) + gammaln(N - i + 1) - gammaln(N + 2)
    return f * np.exp(log_binom + log_beta)


def evaluate_mixture(mix: MixtureDensity, x):
    """Mixture density at ``x`` on its own support [a, b]; zero outside."""
    x = np.asarray(x, dtype=float)
    u = (np.atleast_1d(x) - mix.a) / (mix.b - mix.a)
    vals = mix.basis.densities(u) @ mix.weights / (mix.b - mix.a)
    return float(vals[0]) if x.ndim == 0 else vals


def smooth_estimate(p: Partition, h_bar, N: int = DEFAULT_DEGREE) -> MixtureDensity:
    """Bayes decision in the degree-N Bernstein mixtures for step heights ``h_bar``."""
    basis = BernsteinBasis(N)
    prob = QPProblem(overlap_matrix(N), moment_vector(basis, p, h_bar))
    mix = solve_simplex_qp(prob, basis=basis)
    return MixtureDensity(basis, mix.weights, p.a, p.b)
