"""Stationary versus Riemann-Liouville fractional Brownian motion.

Type I increments have correlations that ignore absolute time.  Type II
increments remember the start at t = 0; far from it they relax to Type I.
The band between the two is where the measured prime correlations live.
"""
# %%
from primefbm import fbm

for H in (0.3, 0.4, 0.5, 0.6):
    c1 = fbm.corr_type1(H, 1, 1)
    c2 = [fbm.corr_type2(H, 1, 1, i) for i in (0, 10, 1000)]
    print(f"H={H}: Type I {c1:+.4f}   Type II at i=0,10,1000: " + "  ".join(f"{c:+.4f}" for c in c2))

# %% Scaling all of (k, j, i) by the same factor leaves Type II unchanged.
print([round(fbm.corr_type2(0.4, 2 * lam, lam, 3 * lam), 12) for lam in (1, 2, 5)])

# %% Negative Type I correlations at H < 1/2 must cancel in total.
for K in (10, 100, 10**4):
    print(f"partial sum over |k| <= {K}: {fbm.sum_rule_partial(0.3, K):.5f}")

# %% Exact sampling: the ensemble reproduces the analytic increment correlation.
ens = fbm.simulate_type2(0.4, 256, 4000, seed=1)
r, se = ens.increment_corr(1, 1, 0)
print(f"simulated {r:.4f} +/- {se:.4f}, analytic {fbm.corr_type2(0.4, 1, 1, 0):.4f}")
v, _ = ens.variance_ratio()
print(f"Var[B(256)] / 256^0.8 = {v:.3f}")

# %% Where the prime correlations sit for H = 0.4.
for k in range(1, 5):
    lo, hi = fbm.corr_type2(0.4, k, 1, 0), fbm.corr_type1(0.4, k, 1)
    print(f"k={k}: band [{lo:+.4f}, {hi:+.4f}]")
print("implied H from C1 = -0.152:", round(fbm.implied_h_from_c1(-0.152), 3))
