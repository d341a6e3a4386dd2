"""Type I (stationary increment) and Type II (Riemann-Liouville) fractional
Brownian motion: analytic increment correlations, exact path sampling and
a few structural identities.
"""
from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .specfun import DomainError, hyp2f1_row
from .stats import DegenerateInputError, fmt

MAX_SIM_LENGTH = 4096
RNG_NAME = "numpy PCG64, SeedSequence([seed, path]), standard_normal (ziggurat)"


class FactorizationError(np.linalg.LinAlgError):
    def __init__(self, msg, min_eig):
        super().__init__(msg)
        self.min_eig = min_eig


class Kind(enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"


def _check_h(H):
    if not 0.0 < H < 1.0:
        raise DomainError(f"Hurst exponent must lie in (0, 1), got {H}")


def corr_type1(H, k, j):
    """Lag-k correlation of stationary fBm increments of span j."""
    k = np.asarray(k, dtype=float)
    j = np.asarray(j, dtype=float)
    if np.any(j == 0):
        raise DomainError("increment span j must be nonzero")
    h2 = 2 * H
    val = (np.abs(k + j) ** h2 - 2 * np.abs(k) ** h2 + np.abs(k - j) ** h2) / (2 * np.abs(j) ** h2)
    return float(val) if val.ndim == 0 else val


def cov_type1(H, t, s):
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    h2 = 2 * H
    val = 0.5 * (np.abs(t) ** h2 + np.abs(s) ** h2 - np.abs(s - t) ** h2)
    return float(val) if val.ndim == 0 else val


def cov_type2(H, t, s):
    """E[B(t) B(s)] for Riemann-Liouville fBm normalised so Var B(t) = t^2H.

    Symmetric in (t, s); the hypergeometric argument is always min/max.
    """
    _check_h(H)
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0) or np.any(s < 0):
        raise DomainError("times must be non-negative")
    lo, hi = np.broadcast_arrays(np.minimum(t, s), np.maximum(t, s))
    out = np.zeros(lo.shape, dtype=float)
    pos = lo > 0
    if np.any(pos):
        a, b = lo[pos], hi[pos]
        f = hyp2f1_row(H, a / b)
        out[pos] = 2 * H / (H + 0.5) * b ** (H - 0.5) * a ** (H + 0.5) * f
    return float(out) if out.ndim == 0 else out


def _increment_moments(cov, k, j, i):
    a, b = i, i + j
    c, d = i + k, i + k + j
    cross = cov(d, b) - cov(d, a) - cov(c, b) + cov(c, a)
    v1 = cov(b, b) - 2 * cov(a, b) + cov(a, a)
    v2 = cov(d, d) - 2 * cov(c, d) + cov(c, c)
    return cross, v1, v2


def corr_type2(H, k, j, i):
    """Correlation of B(i+j) - B(i) with B(i+k+j) - B(i+k) for Type II fBm."""
    _check_h(H)
    if i < 0 or i + k < 0:
        raise DomainError("increments must start at non-negative times")
    if j < 1:
        raise DomainError("increment span j must be >= 1")
    cross, v1, v2 = _increment_moments(lambda t, s: cov_type2(H, t, s), k, j, i)
    if v1 <= 0 or v2 <= 0:
        raise DomainError("degenerate increment variance")
    return cross / math.sqrt(v1 * v2)


@dataclass(frozen=True)
class FbmKernel:
    H: float
    kind: Kind = Kind.TYPE_II
    sigma: float = 1.0

    def __post_init__(self):
        _check_h(self.H)
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")

    def cov(self, t, s):
        f = cov_type1 if self.kind is Kind.TYPE_I else cov_type2
        return self.sigma**2 * f(self.H, t, s)

    def corr(self, k, j, i=None):
        if self.kind is Kind.TYPE_I:
            return corr_type1(self.H, k, j)
        return corr_type2(self.H, k, j, 0 if i is None else i)


def implied_h_from_c1(c: float) -> float:
    """Invert corr_type1(H, 1, 1) = 2^(2H-1) - 1."""
    if not -0.5 < c < 1.0:
        raise DomainError(f"lag-1 correlation must lie in (-0.5, 1), got {c}")
    return 0.5 * (1.0 + math.log2(1.0 + c))


def sum_rule_partial(H: float, K: int) -> float:
    """Sum of corr_type1(H, k, 1) over k = -K..K."""
    if not 0.0 < H < 0.5:
        raise DomainError("sum rule applies for 0 < H < 1/2")
    if K < 1:
        raise ValueError("K must be >= 1")
    k = np.arange(1, K + 1)
    return 1.0 + 2.0 * math.fsum(corr_type1(H, k, 1).tolist())


def conditional_limit_weights(H, i1, i2, t, anchored: bool = False):
    """Weights (w1, w2) with E[B(t) | B(i1), B(i2)] = w1 B(i1) + w2 B(i2).

    By default the two observations are the only information: the level of
    the process is unknown, so the prediction is built from the increment
    B(i2) - B(i1) and the weights sum to one.  ``anchored=True`` also uses
    the Type I convention B(0) = 0 and solves the plain 2x2 covariance
    system.
    """
    _check_h(H)
    if i1 == i2:
        raise DegenerateInputError("i1 == i2 gives a singular system")
    if not 0 < i1 < i2 < t:
        raise DomainError("need 0 < i1 < i2 < t")
    if anchored:
        cov = np.array([[cov_type1(H, i1, i1), cov_type1(H, i1, i2)],
                        [cov_type1(H, i1, i2), cov_type1(H, i2, i2)]])
        rhs = np.array([cov_type1(H, t, i1), cov_type1(H, t, i2)])
        w = np.linalg.solve(cov, rhs)
        return float(w[0]), float(w[1])
    h2 = 2 * H
    gap = float(i2 - i1) ** h2
    # Cov(B(t) - B(i1), B(i2) - B(i1)) via the stationary structure function
    cross = 0.5 * (float(t - i1) ** h2 + gap - float(t - i2) ** h2)
    w2 = cross / gap
    return 1.0 - w2, w2


def type2_covariance_matrix(H, n: int) -> np.ndarray:
    """Covariance of B(1), ..., B(n) for Type II fBm."""
    _check_h(H)
    idx = np.arange(1, n + 1, dtype=float)
    r, c = np.triu_indices(n)
    vals = cov_type2(H, idx[r], idx[c])
    out = np.empty((n, n))
    out[r, c] = vals
    out[c, r] = vals
    return out


@dataclass(frozen=True)
class Ensemble:
    H: float
    paths: np.ndarray  # shape (P, N); column t-1 holds B(t)
    seed: int
    jitter: float
    rng: str = RNG_NAME

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    @property
    def length(self) -> int:
        return self.paths.shape[1]

    def at(self, t: int) -> np.ndarray:
        if t == 0:
            return np.zeros(self.n_paths)
        return self.paths[:, t - 1]

    def increment_corr(self, k: int, j: int, i: int) -> tuple[float, float]:
        """Ensemble correlation of two increments and its standard error."""
        x = self.at(i + j) - self.at(i)
        y = self.at(i + k + j) - self.at(i + k)
        r = float(np.corrcoef(x, y)[0, 1])
        return r, (1 - r * r) / math.sqrt(self.n_paths - 1)

    def variance_ratio(self, t: int | None = None) -> tuple[float, float]:
        """Var[B(t)] / t^2H across paths, with standard error."""
        t = self.length if t is None else t
        v = float(np.var(self.at(t), ddof=1)) / t ** (2 * self.H)
        return v, v * math.sqrt(2.0 / (self.n_paths - 1))

    def increment_kurtosis(self, i: int = 0, j: int = 1) -> tuple[float, float]:
        x = self.at(i + j) - self.at(i)
        c = x - x.mean()
        m2 = np.mean(c**2)
        return float(np.mean(c**4) / m2**2), math.sqrt(24.0 / self.n_paths)


def _cholesky(cov):
    try:
        return np.linalg.cholesky(cov), 0.0
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-12 * float(np.max(np.diag(cov)))
    try:
        return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0])), jitter
    except np.linalg.LinAlgError:
        min_eig = float(np.linalg.eigvalsh(cov)[0])
        raise FactorizationError(
            f"covariance not positive definite after jitter {jitter:.3g}; "
            f"minimum eigenvalue {min_eig:.3g}",
            min_eig,
        ) from None


def simulate_type2(H, length: int, paths: int, seed: int, workers: int = 1) -> Ensemble:
    """Exact Gaussian samples of Type II fBm at t = 1..length.

    Path p draws its normals from its own generator seeded by (seed, p), so
    the ensemble does not depend on how paths are scheduled.
    """
    if not 1 <= length <= MAX_SIM_LENGTH:
        raise ValueError(f"length must be in [1, {MAX_SIM_LENGTH}]")
    if paths < 1:
        raise ValueError("need at least one path")
    chol, jitter = _cholesky(type2_covariance_matrix(H, length))

    def draw(p):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, p])))
        return rng.standard_normal(length)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            noise = np.array(list(pool.map(draw, range(paths))))
    else:
        noise = np.array([draw(p) for p in range(paths)])
    return Ensemble(float(H), noise @ chol.T, seed, jitter)


def write_ensemble_csv(path, ens: Ensemble, stats):
    """``stats`` is an iterable of (name, value, stderr)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["H", "N", "P", "seed", "statistic", "value", "stderr"])
        for name, value, se in stats:
            w.writerow([fmt(ens.H), ens.length, ens.n_paths, ens.seed, name, fmt(value), fmt(se)])
