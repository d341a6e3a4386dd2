"""b(i) rebuilt from zeta zeros.

Normalised b(i) is compared with 1 minus an oscillating sum over zero
ordinates.  More zeros shrink the mismatch over primes between 10^4 and
10^6.  The ordinates come from the test fixture, which
tools/make_zeta_zeros.py regenerates.
"""
# %%
from pathlib import Path

from primefbm import build_b_series, first_n_primes
from primefbm.experiments import explicit_check
from primefbm.series import load_zeta_zeros

zeros = load_zeta_zeros(Path(__file__).parents[1] / "tests" / "data" / "zeta_zeros_10k.txt")
cache = first_n_primes(80000)  # covers every prime below 10^6
b = build_b_series(cache)

chk = explicit_check(b, cache, zeros, counts=(0, 10, 100, 1000, 10000))
print(f"{chk.n_primes} primes in [1e4, 1e6]")
for c, r in zip(chk.counts, chk.rms):
    print(f"{c:>6d} zeros: rms mismatch {r:.4f}")
