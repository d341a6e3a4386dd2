"""How far does the i-th prime sit from the logarithmic-integral prediction?

Sieve a million primes, build b(i) = Li(p_i) - i and look at its size and
its dyadic differences.  Run with ``python demos/01_primes_and_b_series.py``.
"""
# %%
import numpy as np

from primefbm import build_b_series, first_n_primes, li
from primefbm.series import delta_sequence

cache = first_n_primes(1 << 20)
print(f"{cache.count} primes, the last one is {int(cache.primes[-1])}")

# %% b(i) drifts upward roughly like sqrt(p_i) / log(p_i).
b = build_b_series(cache)
for i in (10, 1000, 78498, cache.count):
    p = int(cache.primes[i - 1])
    print(f"b({i:>7d}) = {b(i):10.4f}   sqrt(p)/log(p) = {np.sqrt(p) / np.log(p):9.4f}")

# The 78498th prime is the last one below 10^6.
print("li(999983) - 78498 =", li(999983.0) - 78498)

# %% Differences at stride 2^n: 2^m - 1 of them, each spanning 2^n primes.
for n in (0, 4, 8):
    d = delta_sequence(b, 10, n).entries
    print(f"m=10, n={n}: {d.size} steps, mean {d.mean():8.4f}, std {d.std():8.4f}")
