"""How high up the critical strip can this test see?

A zero at distance d from the line only shows once the stride 2^n passes
about 2^(1/d^2); with a cap on the prime index that bounds the reachable T.
"""
# %%
from primefbm import sensitivity

for d in (0.45, 0.35, 0.25, 0.2, 0.15):
    s = sensitivity(d, 1e22)
    reach = "out of reach" if s.out_of_reach else f"T up to {s.T_max:.3g}"
    print(f"d={d}: strides up to 2^{s.n_needed:.1f} needed, {reach}")

# %% Prime count needed to see a given T at d = 1/4.
s = sensitivity(0.25, 1e22)
for T in (1e4, 1e10, 1e17):
    print(f"T={T:g}: {s.primes_needed(T):.3g} primes")
