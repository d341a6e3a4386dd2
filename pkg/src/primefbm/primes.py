"""Segmented prime sieve, prime caches and their on-disk format.

The sieve is an odd-only Eratosthenes bitmap processed one segment at a
time, so memory stays bounded by the segment budget no matter how far the
sieve runs.  Segments are independent and may be sieved concurrently; they
are always merged in ascending order.
"""
from __future__ import annotations

import hashlib
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

DEFAULT_SEGMENT_BUDGET = 1 << 20  # odd-number bitmap entries per segment
MAX_HI = 1 << 63

CACHE_MAGIC = b"PRIM"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIQ")  # magic, version u32, count u64


class PrimeConfigError(ValueError):
    """Invalid sieve arguments or segment budget."""


class CacheFormatError(ValueError):
    """Base class for malformed prime cache files."""


class BadMagicError(CacheFormatError):
    pass


class TruncatedCacheError(CacheFormatError):
    pass


class MonotonicityError(CacheFormatError):
    pass


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as int64 (plain, unsegmented)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _odd_span(lo: int, hi: int) -> tuple[int, int]:
    first = lo | 1
    return first, max(0, (hi - first + 1) // 2)


def sieve_segment(
    lo: int,
    hi: int,
    budget: int = DEFAULT_SEGMENT_BUDGET,
    base: np.ndarray | None = None,
) -> np.ndarray:
    """Primes in ``[lo, hi)`` in ascending order, as uint64.

    ``base`` may carry precomputed odd base primes covering ``sqrt(hi)``;
    otherwise they are computed here.
    """
    lo, hi = int(lo), int(hi)
    if lo < 0 or hi > MAX_HI or lo > hi:
        raise PrimeConfigError(f"need 0 <= lo <= hi <= 2**63, got [{lo}, {hi})")
    first, n_odd = _odd_span(lo, hi)
    if n_odd > budget:
        raise PrimeConfigError(
            f"segment [{lo}, {hi}) needs {n_odd} bitmap entries, budget is {budget}"
        )
    if lo >= hi:
        return np.empty(0, dtype=np.uint64)

    if base is None:
        base = simple_sieve(math.isqrt(hi - 1))

    mask = np.ones(n_odd, dtype=bool)
    if n_odd:
        odd_base = base[(base > 2) & (base * base < hi)]
        if odd_base.size:
            starts = np.maximum(odd_base * odd_base, -(-first // odd_base) * odd_base)
            starts += np.where(starts % 2 == 0, odd_base, 0)
            offsets = (starts - first) // 2
            for p, off in zip(odd_base.tolist(), offsets.tolist()):
                if off < n_odd:
                    mask[off::p] = False
        if first == 1:
            mask[0] = False

    found = first + 2 * np.flatnonzero(mask).astype(np.uint64)
    if lo <= 2 < hi:
        found = np.concatenate([np.array([2], dtype=np.uint64), found])
    return found.astype(np.uint64, copy=False)


def _segment_bounds(lo: int, hi: int, budget: int) -> Iterator[tuple[int, int]]:
    width = 2 * budget
    start = lo
    while start < hi:
        stop = min(hi, start + width)
        yield start, stop
        start = stop


def primes_below(
    limit: int, budget: int = DEFAULT_SEGMENT_BUDGET, workers: int = 1
) -> np.ndarray:
    """All primes < limit, sieved segment by segment."""
    if limit <= 2:
        return np.empty(0, dtype=np.uint64)
    base = simple_sieve(math.isqrt(limit - 1))
    bounds = list(_segment_bounds(2, limit, budget))

    def run(b):
        return sieve_segment(b[0], b[1], budget, base)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    return np.concatenate(parts)


def nth_prime_upper_bound(n: int) -> int:
    """Rosser-type bound p_n < n (ln n + ln ln n), valid for n >= 6."""
    if n < 6:
        return 13
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


@dataclass(frozen=True, eq=False)
class PrimeCache:
    """The first ``count`` primes as an immutable uint64 array."""

    primes: np.ndarray
    _digest: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.primes, dtype=np.uint64)
        arr.setflags(write=False)
        object.__setattr__(self, "primes", arr)

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def __len__(self) -> int:
        return self.count

    def __eq__(self, other):
        if not isinstance(other, PrimeCache):
            return NotImplemented
        return np.array_equal(self.primes, other.primes)

    __hash__ = None

    def identity(self) -> str:
        """Hex SHA-256 over the little-endian payload; memoised."""
        if not self._digest:
            self._digest.append(hashlib.sha256(self.primes.astype("<u8").tobytes()).hexdigest())
        return self._digest[0]

    def prefix(self, n: int) -> "PrimeCache":
        if not 1 <= n <= self.count:
            raise ValueError(f"prefix length {n} outside [1, {self.count}]")
        return PrimeCache(self.primes[:n])

    def pi(self, x: int) -> int:
        """Number of cached primes <= x."""
        return int(np.searchsorted(self.primes, np.uint64(x), side="right"))


def first_n_primes(
    n: int, budget: int = DEFAULT_SEGMENT_BUDGET, workers: int = 1
) -> PrimeCache:
    """Exactly the first ``n`` primes.

    Segments are sieved upward from 2 until ``n`` primes are collected.  The
    base primes are sized from the n-th prime upper bound and the bound is
    grown if the sieve ever runs past it.
    """
    if n < 1:
        raise PrimeConfigError("n must be >= 1")
    bound = nth_prime_upper_bound(n)
    collected: list[np.ndarray] = []
    total = 0
    lo = 2
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while total < n:
            base = simple_sieve(math.isqrt(bound) + 1)
            batch = list(_segment_bounds(lo, bound + 1, budget))
            step = max(1, workers)
            for i in range(0, len(batch), step):
                chunk = batch[i : i + step]

                def run(b):
                    return sieve_segment(b[0], b[1], budget, base)

                parts = list(pool.map(run, chunk)) if pool else [run(b) for b in chunk]
                for part in parts:
                    collected.append(part)
                    total += part.size
                lo = chunk[-1][1]
                if total >= n:
                    break
            bound = int(bound * 1.1) + 16
    finally:
        if pool:
            pool.shutdown()
    primes = np.concatenate(collected)[:n]
    return PrimeCache(primes)


def write_cache(cache: PrimeCache, path) -> None:
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, cache.count))
        fh.write(cache.primes.astype("<u8").tobytes())


def read_cache(path) -> PrimeCache:
    """Load and validate a cache written by :func:`write_cache`."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedCacheError(f"{path}: file shorter than the {_HEADER.size}-byte header")
    magic, version, count = _HEADER.unpack_from(raw)
    if magic != CACHE_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise CacheFormatError(f"{path}: unsupported version {version}")
    payload = len(raw) - _HEADER.size
    if payload != 8 * count:
        raise TruncatedCacheError(
            f"{path}: header says {count} primes, payload holds {payload / 8:g}"
        )
    primes = np.frombuffer(raw, dtype="<u8", offset=_HEADER.size).astype(np.uint64)
    if count and primes[0] != 2:
        raise MonotonicityError(f"{path}: first prime is {primes[0]}, not 2")
    bad = np.flatnonzero(np.diff(primes.astype(np.int64)) <= 0)
    if bad.size:
        raise MonotonicityError(f"{path}: not increasing at index {int(bad[0]) + 1}")
    return PrimeCache(primes)
