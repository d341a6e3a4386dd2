"""Batch command line: ``primefbm <subcommand> [options]``.

Exit codes: 0 success, 2 usage or configuration error, 3 data or parse
error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import fbm
from .primes import CacheFormatError, PrimeConfigError, write_cache
from .series import (
    NumericCheckError,
    SeriesFormatError,
    SeriesRangeError,
    SeriesUsageError,
    ZerosParseError,
    build_b_series,
    inject_quartet,
    load_zeta_zeros,
    read_bseries,
    write_bseries,
)
from .specfun import ConvergenceError, DomainError
from .stats import DegenerateInputError, FitError, fmt

log = logging.getLogger("primefbm")

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4

_CONFIG_KEYS = ("m_min", "m_max", "budget", "ks", "n_primes", "cache", "d", "T", "seed", "threads", "out_dir")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value file; command-line flags win")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)


def _grid_flags(p):
    p.add_argument("--m-min", dest="m_min", type=int)
    p.add_argument("--m-max", dest="m_max", type=int)
    p.add_argument("--budget", type=int, help="n runs over 0..budget-m")
    p.add_argument("--ks", help="comma separated lags")
    p.add_argument("--n-primes", dest="n_primes", type=float)
    p.add_argument("--cache", help="prime cache file (built if missing)")


def _config(args) -> ex.ExperimentConfig:
    values = ex.read_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if "n_primes" in values and not isinstance(values["n_primes"], str):
        values["n_primes"] = int(values["n_primes"])
    return ex.ExperimentConfig.from_mapping(values)


def _out(cfg) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _series(cfg, bseries_path=None):
    cache = ex.load_or_build_cache(cfg.cache, cfg.n_primes, cfg.threads)
    if bseries_path:
        b = read_bseries(bseries_path)
        if b.count < cfg.n_primes:
            raise SeriesRangeError(f"{bseries_path} holds {b.count} values, need {cfg.n_primes}")
    else:
        b = build_b_series(cache)
    return cache, b


def cmd_primes(args):
    cfg = _config(args)
    path = args.output or cfg.cache or str(_out(cfg) / "primes.bin")
    cache = ex.load_or_build_cache(None, cfg.n_primes, cfg.threads)
    write_cache(cache, path)
    print(f"{cache.count} primes, largest {int(cache.primes[-1])} -> {path}")


def cmd_bseries(args):
    cfg = _config(args)
    cache, b = _series(cfg)
    path = args.output or str(_out(cfg) / "bseries.bin")
    write_bseries(b, path)
    print(f"b(1..{b.count}) -> {path}; b(N) = {fmt(b.values[-1])}")


def cmd_grid(args):
    cfg = _config(args)
    cache, b = _series(cfg, args.bseries)
    if cfg.injection:
        b = inject_quartet(b, cache, *cfg.injection)
    res = ex.run_grid(cfg, b)
    for p in ex.write_grid_outputs(res, _out(cfg)):
        print(p)


def cmd_inject(args):
    cfg = _config(args)
    if cfg.injection is None:
        raise ex.ConfigError("inject needs --d and --T")
    cache, b = _series(cfg, args.bseries)
    mod = inject_quartet(b, cache, *cfg.injection)
    path = args.output or str(_out(cfg) / "bseries_injected.bin")
    write_bseries(mod, path)
    print(f"injected d={cfg.d} T={cfg.T} -> {path}")


def cmd_bifurcate(args):
    cfg = _config(args)
    if cfg.injection is None:
        raise ex.ConfigError("bifurcate needs --d and --T")
    cache, b = _series(cfg, args.bseries)
    k = args.k
    one = ex.with_overrides(cfg, ks=(k,))
    base = ex.run_grid(one, b).grid(k)
    inj = ex.run_grid(one, inject_quartet(b, cache, *cfg.injection)).grid(k)
    rep = ex.detect_bifurcation(base, inj, cfg.T)
    out = _out(cfg)
    ex.write_rows(out / "bifurcation_cells.csv", ["m", "n", "k", "baseline", "injected", "flagged"],
                  [(m, n, k, base.cells[(m, n)], inj.cells[(m, n)], int((m, n) in rep.flagged))
                   for (m, n) in sorted(base.cells)])
    print(f"flagged cells: {len(rep.flagged)}")
    print(f"m*: {rep.m_star}")
    if rep.log2_T_minus_m_star is not None:
        print(f"log2(T) - m*: {fmt(rep.log2_T_minus_m_star)}")


def cmd_fbm_corr(args):
    kind = fbm.Kind(args.kind)
    rows = []
    for k in _ints(args.ks):
        if kind is fbm.Kind.TYPE_I:
            rows.append((args.H, k, args.j, "", fbm.corr_type1(args.H, k, args.j)))
        else:
            rows.append((args.H, k, args.j, args.i, fbm.corr_type2(args.H, k, args.j, args.i)))
    _emit(args, "fbm_corr.csv", ["H", "k", "j", "i", "value"], rows)


def cmd_fbm_sim(args):
    seed = args.seed if args.seed is not None else 0
    ens = fbm.simulate_type2(args.H, args.length, args.paths, seed, args.threads or 1)
    r, r_se = ens.increment_corr(1, 1, 0)
    v, v_se = ens.variance_ratio()
    ku, ku_se = ens.increment_kurtosis()
    stats = [("corr_k1_j1_i0", r, r_se), ("var_ratio_N", v, v_se), ("kurtosis_j1_i0", ku, ku_se)]
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    fbm.write_ensemble_csv(out / "fbm_sim.csv", ens, stats)
    if ens.jitter:
        print(f"diagonal jitter applied: {ens.jitter:.3g}")
    print(f"rng: {ens.rng}")
    print(out / "fbm_sim.csv")


def cmd_fig5(args):
    grid = np.round(np.arange(args.h_step, 1.0, args.h_step), 10)
    rows = ex.fig5_rows(grid, _ints(args.ks))
    _emit(args, "fig5.csv", ["H", "k", "type1", "type2_i0"], rows)


def cmd_fig6(args):
    cfg = _config(args)
    if args.summary:
        summaries = _read_summary(args.summary)
    else:
        cache, b = _series(cfg, args.bseries)
        summaries = ex.run_grid(cfg, b)
        summaries = [s for k in sorted(summaries.grids) for s in summaries.grids[k].summaries()]
    rows = ex.fig6_rows(args.H, summaries)
    ex.write_rows(_out(cfg) / "fig6.csv", ["m", "k", "measured", "band_lo", "band_hi"], rows)
    print(_out(cfg) / "fig6.csv")


def cmd_explicit(args):
    cfg = _config(args)
    if not Path(args.zeros).exists():
        raise FileNotFoundError(f"zeros file {args.zeros} not found")
    zeros = load_zeta_zeros(args.zeros)
    cache, b = _series(cfg, args.bseries)
    chk = ex.explicit_check(b, cache, zeros, (args.lo, args.hi), _ints(args.counts))
    ex.write_rows(_out(cfg) / "explicit.csv", ["zeros", "rms"], list(zip(chk.counts, chk.rms)))
    for c, r in zip(chk.counts, chk.rms):
        print(f"{c:>7d} zeros: rms {fmt(r)}")
    print("trend: " + ("non-increasing" if chk.non_increasing else "NOT monotone"))


def cmd_sensitivity(args):
    s = ex.sensitivity(args.d, args.max_index)
    print(f"n needed: {fmt(s.n_needed)}")
    if s.out_of_reach:
        print(f"T_max: out of reach (2^{fmt(s.log2_T_max)})")
    else:
        print(f"T_max: {s.T_max:.6g}")
    if args.T is not None:
        print(f"primes needed at T={args.T:g}: {s.primes_needed(args.T):.6g}")


def _ints(text):
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def _emit(args, name, header, rows):
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    ex.write_rows(out / name, header, rows)
    print(out / name)


def _read_summary(path):
    import csv

    from .stats import FitResult, MSummary

    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return [MSummary(int(r["m"]), int(r["k"]), float(r["mean"]), float(r["std"]),
                     FitResult(float(r["slope"]), 0.0, float(r["ci_lo"]), float(r["ci_hi"])))
            for r in rows]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primefbm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, grid=True, helptext=None):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        if grid:
            _grid_flags(p)
        p.set_defaults(func=func)
        return p

    p = add("primes", cmd_primes, helptext="sieve the first N primes into a cache file")
    p.add_argument("-o", "--output")
    p = add("bseries", cmd_bseries, helptext="build b(i) = Li(p_i) - i")
    p.add_argument("-o", "--output")
    for name, func, h in (("grid", cmd_grid, "correlation, variance and kurtosis grids"),
                          ("inject", cmd_inject, "write an injected b series"),
                          ("bifurcate", cmd_bifurcate, "compare injected and baseline grids")):
        p = add(name, func, helptext=h)
        p.add_argument("--bseries", help="precomputed b series file")
        p.add_argument("--d", type=float)
        p.add_argument("--T", type=float)
        if name == "inject":
            p.add_argument("-o", "--output")
        if name == "bifurcate":
            p.add_argument("--k", type=int, default=1)

    p = add("fbm-corr", cmd_fbm_corr, grid=False, helptext="analytic fBm increment correlations")
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--kind", choices=["I", "II"], default="II")
    p.add_argument("--ks", default="1,2")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--i", type=int, default=0)

    p = add("fbm-sim", cmd_fbm_sim, grid=False, helptext="exact Type II fBm ensemble")
    p.add_argument("--H", type=float, default=0.4)
    p.add_argument("--length", type=int, default=1024)
    p.add_argument("--paths", type=int, default=10000)

    p = add("fig5", cmd_fig5, grid=False, helptext="Type I / Type II correlations versus H")
    p.add_argument("--ks", default="1,2")
    p.add_argument("--h-step", dest="h_step", type=float, default=0.01)

    p = add("fig6", cmd_fig6, helptext="measured C_k(m) beside the fBm band")
    p.add_argument("--H", type=float, default=0.4)
    p.add_argument("--summary", help="summary.csv from the grid command")
    p.add_argument("--bseries")

    p = add("explicit", cmd_explicit, helptext="explicit formula RMS trend")
    p.add_argument("--zeros", required=True)
    p.add_argument("--bseries")
    p.add_argument("--lo", type=float, default=1e4)
    p.add_argument("--hi", type=float, default=1e6)
    p.add_argument("--counts", default="100,1000,10000")

    p = add("sensitivity", cmd_sensitivity, grid=False, helptext="reach of the scale-invariance test")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--max-index", dest="max_index", type=float, default=1e22)
    p.add_argument("--T", type=float)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        args.func(args)
    except (ex.ConfigError, PrimeConfigError, SeriesUsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CacheFormatError, SeriesFormatError, ZerosParseError, SeriesRangeError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericCheckError, ConvergenceError, DegenerateInputError, FitError,
            fbm.FactorizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
