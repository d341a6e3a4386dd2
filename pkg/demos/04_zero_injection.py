"""What a zeta zero off the critical line would do to the correlations.

We add the oscillation a zero at 1/2 + d + iT would contribute to b and
recompute C_1(m, n).  Cells whose value moves by more than 5/sqrt(2^m) are
flagged; they cluster near 2^m ~ T, and the curves fan out with n.  The
default uses 2^22 primes; ``--full`` runs 2^26.
"""
# %%
import math
import sys

from primefbm import ExperimentConfig, build_b_series, detect_bifurcation, first_n_primes, run_grid
from primefbm.series import inject_quartet

budget = 26 if "--full" in sys.argv else 22
d, T = 0.25, 20000.0 if budget == 26 else 2000.0
cfg = ExperimentConfig(m_min=8, m_max=min(16, budget - 6), budget=budget, ks=(1,), n_primes=1 << budget)
cache = first_n_primes(cfg.n_primes)
b = build_b_series(cache)

base = run_grid(cfg, b).grid(1)
inj = run_grid(cfg, inject_quartet(b, cache, d, T)).grid(1)
rep = detect_bifurcation(base, inj, T)

# %%
print(f"d={d}, T={T:g}, log2 T = {math.log2(T):.2f}")
print(f"flagged cells: {len(rep.flagged)}; smallest flagged m = {rep.m_star}")
for m in base.ms():
    row = " ".join(f"{inj.cells[(m, n)] - base.cells[(m, n)]:+.3f}" for n in base.ns(m))
    print(f"m={m:2d} first flagged n={rep.first_flagged_n(m)}: {row}")
