import math

import numpy as np
import pytest

from primefbm import fbm
from primefbm.experiments import (
    ConfigError,
    ExperimentConfig,
    detect_bifurcation,
    explicit_check,
    fig5_rows,
    fig6_rows,
    load_or_build_cache,
    read_config_file,
    run_grid,
    sensitivity,
    surrogate_series,
    write_grid_outputs,
)
from primefbm.series import SeriesRangeError, build_b_series, inject_quartet, normalized_b
from primefbm.stats import CorrelationGrid


def small_config(**kw):
    base = dict(m_min=10, m_max=12, budget=17, ks=(1, 2), n_primes=1 << 17)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_invariants():
    with pytest.raises(ConfigError):
        ExperimentConfig(budget=27, n_primes=1 << 26)
    with pytest.raises(ConfigError):
        ExperimentConfig(ks=(0,))
    with pytest.raises(ConfigError):
        ExperimentConfig(d=0.25)
    cfg = ExperimentConfig()
    assert cfg.n_max(16) == 10 and cfg.n_max(10) == 16 and len(cfg.cells()) == sum(range(11, 18))


def test_config_file_and_override(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# desk run\nm_min = 11\nks = 1,3\nn-primes = 65536\nbudget=16\nm_max=12\n")
    values = read_config_file(f)
    cfg = ExperimentConfig.from_mapping(values)
    assert (cfg.m_min, cfg.ks, cfg.n_primes) == (11, (1, 3), 65536)
    values["m_min"] = 10
    assert ExperimentConfig.from_mapping(values).m_min == 10
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"bogus": 1})
    f.write_text("m_min 3\n")
    with pytest.raises(ConfigError):
        read_config_file(f)


def test_grid_shapes_and_determinism(small_b):
    cfg = small_config()
    a = run_grid(cfg, small_b)
    b = run_grid(small_config(threads=4), small_b)
    assert a.grids[1].cells == b.grids[1].cells and a.variance == b.variance
    assert sorted(a.grids[1].cells) == cfg.cells()
    assert all(-1 <= v <= 1 for g in a.grids.values() for v in g.cells.values())


def test_grid_needs_enough_primes(small_b):
    with pytest.raises(SeriesRangeError, match="262144"):
        run_grid(small_config(budget=18, n_primes=1 << 18), small_b)


def test_prefix_grid_is_subgrid(small_cache, small_b):
    full = run_grid(small_config(), small_b)
    part_b = build_b_series(small_cache.prefix(1 << 15))
    part = run_grid(small_config(budget=15, n_primes=1 << 15), part_b)
    for cell, v in part.grids[1].cells.items():
        assert v == pytest.approx(full.grids[1].cells[cell], abs=1e-12)


def test_prime_correlations_negative_at_small_scale(small_b):
    res = run_grid(small_config(), small_b)
    for m in (10, 11, 12):
        assert res.grid(1).summary(m).mean < 0


def test_surrogate_null():
    b = surrogate_series(1 << 17, seed=5)
    res = run_grid(small_config(), b)
    for m in (10, 11, 12):
        assert abs(res.grid(1).summary(m).mean) < 3 / math.sqrt(2**m)
        assert abs(res.variance_hurst(m) - 0.5) < 0.02


def test_surrogate_is_seeded():
    assert np.array_equal(surrogate_series(1000, 1).values, surrogate_series(1000, 1).values)


def test_bifurcation_identity_and_support(small_b):
    g = run_grid(small_config(ks=(1,)), small_b).grid(1)
    rep = detect_bifurcation(g, g, 20000.0)
    assert rep.flagged == [] and rep.m_star is None
    other = CorrelationGrid(1, {k: v for k, v in list(g.cells.items())[:-1]})
    with pytest.raises(ConfigError):
        detect_bifurcation(g, other)


def test_bifurcation_threshold():
    base = CorrelationGrid(1, {(10, 0): 0.0, (10, 1): 0.0, (12, 0): 0.0})
    inj = CorrelationGrid(1, {(10, 0): 0.1, (10, 1): 0.2, (12, 0): 0.1})
    rep = detect_bifurcation(base, inj, 2.0**13)
    assert rep.flagged == [(10, 1), (12, 0)]  # 5/32 = 0.156, 5/64 = 0.078
    assert rep.m_star == 10 and rep.log2_T_minus_m_star == pytest.approx(3.0)
    assert rep.first_flagged_n(10) == 1 and rep.first_flagged_n(11) is None


def test_injection_moves_small_scale_grid(small_cache, small_b):
    cfg = small_config(ks=(1,))
    base = run_grid(cfg, small_b).grid(1)
    inj = run_grid(cfg, inject_quartet(small_b, small_cache, 0.45, 2000.0)).grid(1)
    assert detect_bifurcation(base, inj, 2000.0).flagged


def test_sensitivity_examples():
    s = sensitivity(0.25, 1e22)
    assert s.n_needed == 16
    assert 1e17 <= s.T_max <= 2e17
    assert s.primes_needed(1e17) == 1e17 / 0.25**2 == pytest.approx(1.6e18)
    assert sensitivity(0.25, 2.0**20).T_max == pytest.approx(16.0)
    tiny = sensitivity(0.01, 1e22)
    assert tiny.out_of_reach and tiny.T_max == 0.0 and tiny.log2_T_max < -9900
    with pytest.raises(ConfigError):
        sensitivity(0.5, 1e22)


def test_fig5_rows():
    rows = fig5_rows([0.3, 0.5], (1, 2))
    assert len(rows) == 4
    half = [r for r in rows if r[0] == 0.5]
    assert all(abs(r[2]) < 1e-15 for r in half)
    assert all(abs(r[3]) < 1e-12 for r in half)


def test_band_ordering():
    for k in range(1, 9):
        assert fbm.corr_type2(0.4, k, 1, 0) <= fbm.corr_type1(0.4, k, 1) <= 0


def test_fig6_rows(small_b):
    res = run_grid(small_config(ks=(1, 2, 3)), small_b)
    rows = fig6_rows(0.4, [s for g in res.grids.values() for s in g.summaries()])
    assert len(rows) == 9
    for m, k, measured, lo, hi in rows:
        assert lo <= hi <= 0


def test_explicit_zero_count_zero(small_cache, small_b, zeros):
    chk = explicit_check(small_b, small_cache, zeros, counts=(0, 100))
    p = small_cache.primes.astype(float)
    sel = (p >= 1e4) & (p <= 1e6)
    ref = math.sqrt(np.mean((normalized_b(small_b, small_cache)[sel] - 1) ** 2))
    assert chk.rms[0] == pytest.approx(ref, rel=1e-12)
    assert chk.rms[1] <= chk.rms[0]
    with pytest.raises(SeriesRangeError):
        explicit_check(small_b, small_cache, zeros, counts=(10**5,))


def test_outputs_byte_identical(tmp_path, small_b):
    cfg = small_config()
    a = write_grid_outputs(run_grid(cfg, small_b), tmp_path / "a")
    b = write_grid_outputs(run_grid(small_config(threads=3), small_b), tmp_path / "b")
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()
    header = a[3].read_text().splitlines()[0]
    assert header == "m,k,mean,std,slope,ci_lo,ci_hi"


def test_cache_reuse(tmp_path):
    path = tmp_path / "p.bin"
    c1 = load_or_build_cache(path, 5000)
    assert path.exists()
    c2 = load_or_build_cache(path, 3000)
    assert c2.count == 3000 and np.array_equal(c2.primes, c1.primes[:3000])
    assert load_or_build_cache(path, 6000).count == 6000
