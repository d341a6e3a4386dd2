"""The b(i) = Li(p_i) - i series, its dyadic difference sequences, the
off-line zero injection and the truncated explicit formula.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .primes import PrimeCache
from .specfun import li

BSER_MAGIC = b"BSER"
BSER_VERSION = 1
_BSER_HEADER = struct.Struct("<4sIQIIdd")  # magic, version, count, flag, reserved, d, T

# Gauss-Legendre nodes on [-1, 1] for the Li increments of larger primes.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)
_DIRECT_BELOW = 1000  # increments below this prime use Li differences
_CHUNK = 1 << 20
_SPOT_TOL = 1e-4


class SeriesRangeError(ValueError):
    pass


class SeriesUsageError(ValueError):
    pass


class SeriesFormatError(ValueError):
    pass


class ZerosParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class NumericCheckError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class BSeries:
    values: np.ndarray
    injection: tuple[float, float] | None = None
    prime_provenance: str | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def count(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.count

    def __call__(self, i):
        """b(i), 1-based."""
        return self.values[np.asarray(i) - 1]


@dataclass(frozen=True)
class DiffSequence:
    m: int
    n: int
    entries: np.ndarray


@dataclass(frozen=True)
class ZetaZeros:
    gammas: np.ndarray

    def __len__(self):
        return int(self.gammas.size)


def li_increments(primes) -> np.ndarray:
    """Li(p[i+1]) - Li(p[i]) for consecutive entries of ``primes``."""
    p = np.asarray(primes, dtype=np.float64)
    out = np.empty(max(p.size - 1, 0))
    if out.size == 0:
        return out
    n_direct = int(np.searchsorted(p, _DIRECT_BELOW))
    if n_direct:
        stop = min(n_direct + 1, p.size)
        lv = li(p[:stop])
        out[: stop - 1] = np.diff(lv)
    for lo in range(max(n_direct, 0), out.size, _CHUNK):
        hi = min(lo + _CHUNK, out.size)
        a = p[lo:hi]
        half = 0.5 * (p[lo + 1 : hi + 1] - a)
        mid = a + half
        acc = np.zeros_like(a)
        for x, w in zip(_GL_NODES, _GL_WEIGHTS):
            acc += w / np.log(mid + x * half)
        out[lo:hi] = acc * half
    return out


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def build_b_series(cache: PrimeCache, check: bool = True) -> BSeries:
    """b(i) = Li(p_i) - i accumulated from Li increments.

    Each block of increments is summed locally with ``cumsum`` and offset by
    a carry kept as an unevaluated (hi, lo) pair, so rounding does not grow
    with the series length.
    """
    if cache.count < 1:
        raise SeriesRangeError("empty prime cache")
    primes = cache.primes
    values = np.empty(cache.count)
    carry_hi, carry_lo = li(2.0) - 1.0, 0.0
    values[0] = carry_hi
    for lo in range(0, cache.count - 1, _CHUNK):
        hi = min(lo + _CHUNK, cache.count - 1)
        steps = li_increments(primes[lo : hi + 1]) - 1.0
        local = np.cumsum(steps)
        values[lo + 1 : hi + 1] = (carry_hi + local) + carry_lo
        carry_hi, err = _two_sum(carry_hi, float(local[-1]))
        carry_lo += err
    series = BSeries(values, None, cache.identity())
    if check:
        _spot_check(series, cache)
    return series


def _spot_check(series: BSeries, cache: PrimeCache):
    for i in sorted({1, max(1, cache.count // 2), cache.count}):
        direct = li(float(cache.primes[i - 1])) - i
        if abs(direct - series.values[i - 1]) > _SPOT_TOL:
            raise NumericCheckError(
                f"b({i}) accumulated {series.values[i - 1]!r} vs direct {direct!r}"
            )


def delta_sequence(b: BSeries, m: int, n: int) -> DiffSequence:
    """Delta(m, n): the 2^m - 1 successive differences of b at stride 2^n."""
    if m < 3 or n < 0:
        raise SeriesRangeError(f"need m >= 3 and n >= 0, got m={m}, n={n}")
    need = (1 << m) << n
    if need > b.count:
        raise SeriesRangeError(f"Delta({m},{n}) needs {need} series values, have {b.count}")
    idx = np.arange(1, (1 << m) + 1, dtype=np.int64) << n
    return DiffSequence(m, n, np.diff(b.values[idx - 1]))


def injection_term(p, d: float, T: float) -> np.ndarray:
    """Additive change to b(i) from one off-line zero quartet at (d, T)."""
    p = np.asarray(p, dtype=np.float64)
    lp = np.log(p)
    return 2.0 * p**d / T * np.sin(T * lp) * np.sqrt(p) / lp


def inject_quartet(b: BSeries, cache: PrimeCache, d: float, T: float) -> BSeries:
    """Series modified as if a zero quartet sat at distance d off the
    critical line and height T."""
    if b.injection is not None:
        raise SeriesUsageError("series already carries an injected quartet")
    if not 0.0 < d < 0.5:
        raise SeriesUsageError(f"d must lie in (0, 1/2), got {d}")
    if not T > 0:
        raise SeriesUsageError(f"T must be positive, got {T}")
    if cache.count != b.count:
        raise SeriesUsageError(f"cache holds {cache.count} primes, series {b.count}")
    out = np.empty(b.count)
    for lo in range(0, b.count, _CHUNK):
        hi = min(lo + _CHUNK, b.count)
        out[lo:hi] = b.values[lo:hi] + injection_term(cache.primes[lo:hi], d, T)
    return BSeries(out, (float(d), float(T)), b.prime_provenance)


def normalized_b(b: BSeries, cache: PrimeCache) -> np.ndarray:
    p = cache.primes[: b.count].astype(np.float64)
    return b.values * np.log(p) / np.sqrt(p)


def explicit_formula_rhs(p, zeros: ZetaZeros, num_zeros: int | None = None):
    """1 + 2 * sum over the first ``num_zeros`` ordinates of sin(g ln p) / g."""
    if num_zeros is None:
        num_zeros = len(zeros)
    if num_zeros > len(zeros):
        raise SeriesRangeError(f"asked for {num_zeros} zeros, only {len(zeros)} loaded")
    scalar = np.ndim(p) == 0
    lp = np.log(np.atleast_1d(np.asarray(p, dtype=np.float64)))
    g = zeros.gammas[:num_zeros]
    total = np.zeros_like(lp)
    step = max(1, (1 << 22) // max(1, g.size))
    for lo in range(0, lp.size, step):
        block = lp[lo : lo + step]
        total[lo : lo + step] = (np.sin(np.outer(block, g)) / g).sum(axis=1)
    out = 1.0 + 2.0 * total
    return float(out[0]) if scalar else out


def load_zeta_zeros(path) -> ZetaZeros:
    """Read ordinates, one per line, validating positivity and order."""
    vals = []
    prev = 0.0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                g = float(text)
            except ValueError:
                raise ZerosParseError(lineno, f"not a number: {text!r}") from None
            if not np.isfinite(g) or g <= 0:
                raise ZerosParseError(lineno, f"ordinate must be positive, got {text}")
            if g <= prev:
                raise ZerosParseError(lineno, f"ordinates must ascend ({g} after {prev})")
            vals.append(g)
            prev = g
    return ZetaZeros(np.array(vals, dtype=np.float64))


def write_bseries(b: BSeries, path) -> None:
    d, T = b.injection if b.injection is not None else (0.0, 0.0)
    with open(path, "wb") as fh:
        fh.write(_BSER_HEADER.pack(BSER_MAGIC, BSER_VERSION, b.count, int(b.injection is not None), 0, d, T))
        fh.write(b.values.astype("<f8").tobytes())


def read_bseries(path) -> BSeries:
    raw = Path(path).read_bytes()
    if len(raw) < _BSER_HEADER.size:
        raise SeriesFormatError(f"{path}: shorter than header")
    magic, version, count, flag, _, d, T = _BSER_HEADER.unpack_from(raw)
    if magic != BSER_MAGIC:
        raise SeriesFormatError(f"{path}: bad magic {magic!r}")
    if version != BSER_VERSION:
        raise SeriesFormatError(f"{path}: unsupported version {version}")
    if len(raw) - _BSER_HEADER.size != 8 * count:
        raise SeriesFormatError(f"{path}: header count {count} does not match payload")
    values = np.frombuffer(raw, dtype="<f8", offset=_BSER_HEADER.size)
    return BSeries(values.astype(np.float64), (d, T) if flag else None, None)
