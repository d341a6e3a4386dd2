import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sst

from primefbm.series import BSeries, delta_sequence
from primefbm.stats import (
    CorrelationGrid,
    DegenerateInputError,
    FitError,
    aggregate,
    fmt,
    kurtosis,
    ols_slope_ci,
    pearson_lag,
    variance,
    write_grid_csv,
    write_summary_csv,
)


def brute_pearson(seq, k):
    x, y = list(seq[k:]), list(seq[:-k])
    mx, my = sum(x) / len(x), sum(y) / len(y)
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return num / math.sqrt(sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y))


def test_alternating_is_minus_one():
    assert pearson_lag([1.0, -1.0] * 10, 1) == pytest.approx(-1.0, abs=1e-15)


def test_constant_is_degenerate():
    with pytest.raises(DegenerateInputError):
        pearson_lag(np.full(20, 3.0), 1)


def test_pearson_preconditions():
    with pytest.raises(ValueError):
        pearson_lag(np.arange(5.0), 0)
    with pytest.raises(ValueError):
        pearson_lag(np.arange(5.0), 3)


def test_iid_normal_near_zero(rng):
    x = rng.standard_normal(1 << 16)
    assert abs(pearson_lag(x, 1)) < 4 / 2**8


@pytest.mark.parametrize("k", [1, 2, 5])
def test_pearson_matches_brute_force(rng, k):
    x = rng.exponential(size=300)
    assert pearson_lag(x, k) == pytest.approx(brute_pearson(x, k), abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-100, 100), min_size=8, max_size=40),
    st.floats(0.01, 100),
    st.floats(-1e3, 1e3),
    st.integers(1, 3),
)
def test_pearson_affine_invariance(values, a, c, k):
    x = np.array(values)
    try:
        r = pearson_lag(x, k)
    except DegenerateInputError:
        return
    if np.std(x) < 1e-3:
        return
    assert pearson_lag(a * x + c, k) == pytest.approx(r, abs=1e-8)
    assert pearson_lag(-a * x + c, k) == pytest.approx(r, abs=1e-8)


def test_moments_brute_force():
    x = [0.0, 1.0] * 7 + [0.0]
    n = len(x)
    mean = sum(x) / n
    var = sum((v - mean) ** 2 for v in x) / (n - 1)
    m2 = sum((v - mean) ** 2 for v in x) / n
    m4 = sum((v - mean) ** 4 for v in x) / n
    assert variance(x) == pytest.approx(var, rel=1e-14)
    assert kurtosis(x) == pytest.approx(m4 / m2**2, rel=1e-14)


def test_kurtosis_gaussian_and_exponential(rng):
    assert kurtosis(rng.standard_normal(1 << 20)) == pytest.approx(3.0, abs=0.05)
    assert kurtosis(rng.exponential(size=1 << 20)) == pytest.approx(9.0, abs=0.3)


def test_kurtosis_degenerate():
    with pytest.raises(DegenerateInputError):
        kurtosis(np.ones(10))
    with pytest.raises(ValueError):
        variance([1.0, 2.0, 3.0])


def test_fit_exact_line():
    pts = [(n, 2 * n + 1) for n in range(8)]
    fit = ols_slope_ci(pts)
    assert fit.slope == pytest.approx(2.0, abs=1e-14)
    assert fit.intercept == pytest.approx(1.0, abs=1e-13)
    assert fit.ci_hi - fit.ci_lo < 1e-12


def test_fit_symmetric_noise_straddles_zero(rng):
    half = rng.normal(size=10)
    y = np.concatenate([half, half[::-1]])
    fit = ols_slope_ci(np.column_stack([np.arange(20), y]))
    assert fit.ci_lo < 0 < fit.ci_hi


def test_fit_matches_linregress(rng):
    x = np.arange(15.0)
    y = 0.3 * x + rng.normal(size=15)
    fit = ols_slope_ci(np.column_stack([x, y]), level=0.9)
    ref = sst.linregress(x, y)
    q = sst.t.ppf(0.95, 13)
    assert fit.slope == pytest.approx(ref.slope, rel=1e-12)
    assert fit.ci_hi - fit.slope == pytest.approx(q * ref.stderr, rel=1e-10)
    assert fit.ci_lo <= fit.slope <= fit.ci_hi


def test_fit_errors():
    with pytest.raises(FitError):
        ols_slope_ci([(0, 1), (1, 2)])
    with pytest.raises(FitError):
        ols_slope_ci([(1, 1), (1, 2), (1, 3)])


def test_aggregate_examples():
    assert aggregate([-0.1, -0.1, -0.1]) == pytest.approx((-0.1, 0.0), abs=1e-16)
    mean, std = aggregate([0.0, 1.0])
    assert mean == 0.5 and std == pytest.approx(math.sqrt(0.5))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=2, max_size=30), st.randoms())
def test_aggregate_order_independent(cells, rnd):
    shuffled = list(cells)
    rnd.shuffle(shuffled)
    assert aggregate(shuffled) == aggregate(cells)


def test_random_walk_variance_is_flat(rng):
    b = BSeries(np.cumsum(rng.exponential(size=1 << 19) - 1.0))
    m = 12
    ratios = [variance(delta_sequence(b, m, n).entries) / 2**n for n in range(8)]
    assert np.all(np.abs(np.array(ratios) - 1) < 5 * math.sqrt(2 / 2**m))


def _toy_grid(rng):
    g = CorrelationGrid(1)
    for m in (5, 6):
        for n in range(6):
            g.cells[(m, n)] = float(np.tanh(rng.normal(scale=0.5)))
    return g


def test_grid_summary_recomputes(rng):
    g = _toy_grid(rng)
    assert all(-1 <= v <= 1 for v in g.cells.values())
    s = g.summary(5)
    assert (s.mean, s.std) == aggregate(g.row(5))
    assert s.fit.slope == pytest.approx(sst.linregress(range(6), g.row(5)).slope, rel=1e-12)
    assert s.reference_std == pytest.approx(2**-2.5)


def test_csv_layout(tmp_path, rng):
    g = _toy_grid(rng)
    write_grid_csv(tmp_path / "g.csv", [g])
    write_summary_csv(tmp_path / "s.csv", [g])
    rows = list(csv.reader(open(tmp_path / "g.csv")))
    assert rows[0] == ["m", "n", "k", "value"] and len(rows) == 13
    assert float(rows[1][3]) == pytest.approx(g.cells[(5, 0)], rel=1e-11)
    srows = list(csv.reader(open(tmp_path / "s.csv")))
    assert srows[0] == ["m", "k", "mean", "std", "slope", "ci_lo", "ci_hi"]


def test_fmt_twelve_significant_digits():
    assert fmt(-0.0781234567891234) == "-0.0781234567891"
    assert fmt(1234.5) == "1234.50000000"
    assert fmt(3) == "3"
    assert "e" not in fmt(1.5e-7)
