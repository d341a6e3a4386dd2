"""Lag correlations, moments, slope fits and per-m aggregation."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _st


class DegenerateInputError(ValueError):
    pass


class FitError(ValueError):
    pass


def _fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=np.float64).tolist())


def _centered(a):
    a = np.asarray(a, dtype=np.float64)
    return a - _fsum(a) / a.size


def pearson_lag(seq, k: int) -> float:
    """Lag-k Pearson correlation between seq[k:] and seq[:-k].

    Each truncated copy is centred on its own mean before the products are
    formed.
    """
    seq = np.asarray(seq, dtype=np.float64)
    if k < 1:
        raise ValueError(f"lag must be >= 1, got {k}")
    if seq.size - k < 3:
        raise ValueError(f"sequence of length {seq.size} too short for lag {k}")
    x = _centered(seq[k:])
    y = _centered(seq[:-k])
    sxx = _fsum(x * x)
    syy = _fsum(y * y)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("zero variance in a lagged copy")
    r = _fsum(x * y) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def variance(seq) -> float:
    """Sample variance with the N - 1 divisor."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.size < 4:
        raise ValueError("need at least 4 values")
    c = _centered(seq)
    return _fsum(c * c) / (seq.size - 1)


def kurtosis(seq) -> float:
    """Moment ratio m4 / m2**2 (3 for a Gaussian)."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.size < 4:
        raise ValueError("need at least 4 values")
    c = _centered(seq)
    c2 = c * c
    m2 = _fsum(c2) / seq.size
    if m2 == 0.0:
        raise DegenerateInputError("zero variance")
    return _fsum(c2 * c2) / seq.size / (m2 * m2)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    ci_lo: float
    ci_hi: float
    level: float = 0.95
    stderr: float = 0.0

    def contains(self, value: float) -> bool:
        return self.ci_lo <= value <= self.ci_hi


def ols_slope_ci(points, level: float = 0.95) -> FitResult:
    """Least-squares line through (x, y) pairs with a Student-t slope CI."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise FitError("need at least 3 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    xc = _centered(x)
    sxx = _fsum(xc * xc)
    if sxx == 0.0:
        raise FitError("abscissae are all equal")
    slope = _fsum(xc * (y - _fsum(y) / y.size)) / sxx
    intercept = _fsum(y) / y.size - slope * _fsum(x) / x.size
    resid = y - (intercept + slope * x)
    dof = x.size - 2
    s2 = _fsum(resid * resid) / dof
    se = math.sqrt(s2 / sxx)
    q = _st.t.ppf(0.5 + level / 2, dof)
    return FitResult(slope, intercept, slope - q * se, slope + q * se, level, se)


def aggregate(cells) -> tuple[float, float]:
    """Mean and sample standard deviation across cells."""
    v = np.sort(np.asarray(list(cells), dtype=np.float64))
    if v.size < 2:
        raise ValueError("need at least 2 cells")
    mean = _fsum(v) / v.size
    c = v - mean
    return mean, math.sqrt(_fsum(c * c) / (v.size - 1))


@dataclass(frozen=True)
class MSummary:
    m: int
    k: int
    mean: float
    std: float
    fit: FitResult

    @property
    def reference_std(self) -> float:
        """The 1/sqrt(2^m) scale quoted alongside the measured spread."""
        return 2.0 ** (-self.m / 2)


@dataclass
class CorrelationGrid:
    """C_k(m, n) over a rectangle of (m, n), with per-m summaries."""

    k: int
    cells: dict = field(default_factory=dict)

    def ms(self) -> list[int]:
        return sorted({m for m, _ in self.cells})

    def ns(self, m: int) -> list[int]:
        return sorted(n for mm, n in self.cells if mm == m)

    def row(self, m: int) -> np.ndarray:
        return np.array([self.cells[(m, n)] for n in self.ns(m)])

    def summary(self, m: int, level: float = 0.95) -> MSummary:
        ns = self.ns(m)
        vals = self.row(m)
        mean, std = aggregate(vals)
        fit = ols_slope_ci(np.column_stack([ns, vals]), level)
        return MSummary(m, self.k, mean, std, fit)

    def summaries(self) -> list[MSummary]:
        return [self.summary(m) for m in self.ms()]

    def support(self) -> set:
        return set(self.cells)


def fmt(v: float) -> str:
    """Twelve significant digits, positional notation."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return np.format_float_positional(float(v), precision=12, unique=False, fractional=False, trim="k")


def write_cells_csv(path, rows, header):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if isinstance(v, (float, int, np.floating, np.integer)) else v for v in r])


def write_grid_csv(path, grids):
    rows = []
    for g in grids:
        for (m, n) in sorted(g.cells):
            rows.append((m, n, g.k, g.cells[(m, n)]))
    write_cells_csv(path, rows, ["m", "n", "k", "value"])


def write_summary_csv(path, grids):
    rows = []
    for g in grids:
        for s in g.summaries():
            rows.append((s.m, s.k, s.mean, s.std, s.fit.slope, s.fit.ci_lo, s.fit.ci_hi))
    rows.sort(key=lambda r: (r[0], r[1]))
    write_cells_csv(path, rows, ["m", "k", "mean", "std", "slope", "ci_lo", "ci_hi"])
