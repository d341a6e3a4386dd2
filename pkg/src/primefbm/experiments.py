"""Batch experiments: correlation grids over (m, n), the injected-zero
bifurcation scan, sensitivity estimates, figure tables and the explicit
formula check.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import fbm
from .primes import PrimeCache, first_n_primes, read_cache, write_cache
from .series import (
    BSeries,
    SeriesRangeError,
    ZetaZeros,
    delta_sequence,
    explicit_formula_rhs,
    normalized_b,
)
from .stats import CorrelationGrid, kurtosis, ols_slope_ci, pearson_lag, variance, write_cells_csv

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    m_min: int = 10
    m_max: int = 16
    budget: int = 26  # n runs over 0..budget - m
    ks: tuple = (1, 2, 3, 4, 5, 6, 7, 8)
    n_primes: int = 1 << 26
    cache: str | None = None
    out_dir: str = "out"
    d: float | None = None
    T: float | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        self.ks = tuple(int(k) for k in self.ks)
        self.validate()

    def validate(self):
        if self.m_min < 3 or self.m_max < self.m_min:
            raise ConfigError(f"bad m range [{self.m_min}, {self.m_max}]")
        if any(k < 1 for k in self.ks) or not self.ks:
            raise ConfigError("lags must be >= 1")
        if self.budget - self.m_max < 0:
            raise ConfigError(f"budget {self.budget} leaves no n for m = {self.m_max}")
        if (1 << self.budget) > self.n_primes:
            raise ConfigError(f"budget {self.budget} needs {1 << self.budget} primes, have {self.n_primes}")
        if (self.d is None) != (self.T is None):
            raise ConfigError("injection needs both d and T")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    @property
    def injection(self):
        return None if self.d is None else (self.d, self.T)

    def n_max(self, m: int) -> int:
        return self.budget - m

    def cells(self):
        return [(m, n) for m in range(self.m_min, self.m_max + 1) for n in range(self.n_max(m) + 1)]

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, raw in values.items():
            if raw is None:
                continue
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kw[key] = _coerce(key, raw)
        try:
            return cls(**kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def _coerce(key, raw):
    if not isinstance(raw, str):
        return raw
    try:
        if key == "ks":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if key in ("d", "T"):
            return float(raw)
        if key in ("cache", "out_dir"):
            return raw
        return int(float(raw)) if key == "n_primes" else int(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def read_config_file(path) -> dict:
    """key = value lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def load_or_build_cache(path, n: int, workers: int = 1) -> PrimeCache:
    """Read a prime cache holding at least ``n`` primes, or sieve and save one."""
    if path is not None and Path(path).exists():
        cache = read_cache(path)
        if cache.count >= n:
            return cache if cache.count == n else cache.prefix(n)
        log.info("cache %s holds %d primes, need %d; rebuilding", path, cache.count, n)
    cache = first_n_primes(n, workers=workers)
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        write_cache(cache, path)
    return cache


def surrogate_series(count: int, seed: int) -> BSeries:
    """Random-walk stand-in for b: i.i.d. unit exponential steps minus 1."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0])))
    steps = rng.exponential(1.0, count) - 1.0
    return BSeries(np.cumsum(steps), None, f"surrogate:{seed}")


@dataclass
class GridResult:
    grids: dict  # k -> CorrelationGrid
    variance: dict  # (m, n) -> Var[Delta(m, n)] / 2^n
    kurtosis: dict  # (m, n) -> kurtosis

    def grid(self, k: int) -> CorrelationGrid:
        return self.grids[k]

    def variance_row(self, m):
        ns = sorted(n for mm, n in self.variance if mm == m)
        return np.array(ns), np.array([self.variance[(m, n)] for n in ns])

    def kurtosis_row(self, m):
        ns = sorted(n for mm, n in self.kurtosis if mm == m)
        return np.array(ns), np.array([self.kurtosis[(m, n)] for n in ns])

    def variance_hurst(self, m: int, n_min: int = 0) -> float:
        """H from the growth of Var[Delta(m, n)] ~ 2^(2Hn)."""
        ns, v = self.variance_row(m)
        keep = ns >= n_min
        fit = ols_slope_ci(np.column_stack([ns[keep], np.log2(v[keep])]))
        return 0.5 * (1.0 + fit.slope)


def _cell_stats(b: BSeries, m: int, n: int, ks):
    seq = delta_sequence(b, m, n).entries
    return [pearson_lag(seq, k) for k in ks], variance(seq) / 2.0**n, kurtosis(seq)


def run_grid(config: ExperimentConfig, b: BSeries) -> GridResult:
    """C_k(m, n), scaled variances and kurtosis over the configured cells."""
    need = 1 << config.budget
    if b.count < need:
        raise SeriesRangeError(f"grid with budget {config.budget} needs N >= {need}, series has {b.count}")
    cells = config.cells()

    def work(cell):
        return _cell_stats(b, cell[0], cell[1], config.ks)

    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            results = list(pool.map(work, cells))
    else:
        results = [work(c) for c in cells]

    grids = {k: CorrelationGrid(k) for k in config.ks}
    var, kurt = {}, {}
    for cell, (corrs, v, ku) in zip(cells, results):
        for k, c in zip(config.ks, corrs):
            grids[k].cells[cell] = c
        var[cell] = v
        kurt[cell] = ku
    return GridResult(grids, var, kurt)


def write_grid_outputs(result: GridResult, out_dir, prefix: str = "") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / f"{prefix}correlations.csv", out / f"{prefix}variance.csv",
             out / f"{prefix}kurtosis.csv", out / f"{prefix}summary.csv"]
    from .stats import write_grid_csv, write_summary_csv

    grids = [result.grids[k] for k in sorted(result.grids)]
    write_grid_csv(paths[0], grids)
    write_cells_csv(paths[1], [(m, n, v) for (m, n), v in sorted(result.variance.items())], ["m", "n", "value"])
    write_cells_csv(paths[2], [(m, n, v) for (m, n), v in sorted(result.kurtosis.items())], ["m", "n", "value"])
    write_summary_csv(paths[3], grids)
    return paths


@dataclass
class BifurcationReport:
    flagged: list = field(default_factory=list)  # (m, n) cells
    m_star: int | None = None
    log2_T_minus_m_star: float | None = None

    def first_flagged_n(self, m: int):
        ns = [n for mm, n in self.flagged if mm == m]
        return min(ns) if ns else None

    def earliest_n(self):
        return min((n for _, n in self.flagged), default=None)


def detect_bifurcation(baseline: CorrelationGrid, injected: CorrelationGrid, T: float | None = None) -> BifurcationReport:
    """Flag cells where the injected correlation leaves the baseline by more
    than 5 / sqrt(2^m)."""
    if baseline.support() != injected.support() or baseline.k != injected.k:
        raise ConfigError("baseline and injected grids have different (m, n, k) support")
    flagged = sorted(
        cell for cell in baseline.cells
        if abs(injected.cells[cell] - baseline.cells[cell]) > 5.0 / math.sqrt(2.0 ** cell[0])
    )
    rep = BifurcationReport(flagged)
    if flagged:
        rep.m_star = min(m for m, _ in flagged)
        if T is not None:
            rep.log2_T_minus_m_star = math.log2(T) - rep.m_star
    return rep


@dataclass(frozen=True)
class Sensitivity:
    d: float
    max_index: float
    n_needed: float
    log2_T_max: float
    out_of_reach: bool

    @property
    def T_max(self) -> float:
        return 0.0 if self.out_of_reach else 2.0**self.log2_T_max

    def primes_needed(self, T: float) -> float:
        return T / self.d**2


def sensitivity(d: float, max_index: float) -> Sensitivity:
    """Largest zero height T reachable when the prime index is capped at
    ``max_index``, for a zero at distance d off the critical line."""
    if not 0.0 < d < 0.5:
        raise ConfigError(f"d must lie in (0, 1/2), got {d}")
    if not max_index > 0:
        raise ConfigError("max_index must be positive")
    n_needed = 1.0 / d**2
    log2_t = math.log2(max_index) - n_needed
    return Sensitivity(d, max_index, n_needed, log2_t, log2_t < -1022)


def fig5_rows(H_grid, ks=(1, 2)):
    rows = []
    for H in H_grid:
        for k in ks:
            rows.append((float(H), k, fbm.corr_type1(H, k, 1), fbm.corr_type2(H, k, 1, 0)))
    return rows


def fig6_rows(H, summaries):
    """Measured C_k(m) beside the [Type II at i=0, Type I] band."""
    rows = []
    for s in summaries:
        rows.append((s.m, s.k, s.mean, fbm.corr_type2(H, s.k, 1, 0), fbm.corr_type1(H, s.k, 1)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


@dataclass
class ExplicitCheck:
    counts: tuple
    rms: tuple
    window: tuple
    n_primes: int

    @property
    def non_increasing(self) -> bool:
        return all(b <= a for a, b in zip(self.rms, self.rms[1:]))


def explicit_check(b: BSeries, cache: PrimeCache, zeros: ZetaZeros, window=(1e4, 1e6), counts=(100, 1000, 10000)) -> ExplicitCheck:
    """RMS of normalised b against the truncated zero sum, per zero count."""
    counts = tuple(sorted(int(c) for c in counts))
    if counts and counts[-1] > len(zeros):
        raise SeriesRangeError(f"need {counts[-1]} zeros, file has {len(zeros)}")
    p = cache.primes[: b.count].astype(np.float64)
    sel = (p >= window[0]) & (p <= window[1])
    if not sel.any():
        raise SeriesRangeError(f"no primes in window {window}")
    lhs = normalized_b(b, cache)[sel]
    ps = p[sel]
    rms = []
    partial = np.ones_like(ps)
    done = 0
    for c in counts:
        if c > done:
            chunk = ZetaZeros(zeros.gammas[done:c])
            partial = partial + (explicit_formula_rhs(ps, chunk) - 1.0)
            done = c
        resid = lhs - partial
        rms.append(math.sqrt(math.fsum((resid * resid).tolist()) / resid.size))
    return ExplicitCheck(counts, tuple(rms), tuple(window), int(sel.sum()))


def write_rows(path, header, rows):
    write_cells_csv(path, rows, header)


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
