"""Scale-invariant correlations in the prime series b(i) = Li(p_i) - i and
their comparison with Type I / Type II fractional Brownian motion."""

from .experiments import ExperimentConfig, detect_bifurcation, run_grid, sensitivity
from .fbm import corr_type1, corr_type2, cov_type2, implied_h_from_c1, simulate_type2
from .primes import PrimeCache, first_n_primes, read_cache, sieve_segment, write_cache
from .series import build_b_series, delta_sequence, explicit_formula_rhs, inject_quartet, load_zeta_zeros
from .specfun import ei, hyp2f1_row, li
from .stats import kurtosis, ols_slope_ci, pearson_lag, variance

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig", "detect_bifurcation", "run_grid", "sensitivity",
    "corr_type1", "corr_type2", "cov_type2", "implied_h_from_c1", "simulate_type2",
    "PrimeCache", "first_n_primes", "read_cache", "sieve_segment", "write_cache",
    "build_b_series", "delta_sequence", "explicit_formula_rhs", "inject_quartet", "load_zeta_zeros",
    "ei", "hyp2f1_row", "li",
    "kurtosis", "ols_slope_ci", "pearson_lag", "variance",
]
