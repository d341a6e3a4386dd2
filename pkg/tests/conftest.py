import os
from pathlib import Path

import numpy as np
import pytest

from primefbm.experiments import load_or_build_cache
from primefbm.primes import first_n_primes
from primefbm.series import build_b_series, load_zeta_zeros

DATA = Path(__file__).parent / "data"
DESK_N = 1 << 26
CACHE_DIR = Path(os.environ.get("PRIMEFBM_CACHE_DIR", Path(__file__).parents[1] / ".cache"))


def trial_division_primes(limit):
    out = []
    for x in range(2, limit):
        if all(x % p for p in out if p * p <= x):
            out.append(x)
    return out


@pytest.fixture(scope="session")
def small_cache():
    return first_n_primes(1 << 17)


@pytest.fixture(scope="session")
def small_b(small_cache):
    return build_b_series(small_cache)


@pytest.fixture(scope="session")
def zeros():
    return load_zeta_zeros(DATA / "zeta_zeros_10k.txt")


@pytest.fixture(scope="session")
def desk_cache():
    return load_or_build_cache(CACHE_DIR / "primes_2p26.bin", DESK_N)


@pytest.fixture(scope="session")
def desk_b(desk_cache):
    return build_b_series(desk_cache)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def zeros_path():
    return DATA / "zeta_zeros_10k.txt"


VERDICTS = []


@pytest.fixture(scope="session")
def verdict():
    """Record a one-line PASS/FAIL verdict; shown in the terminal summary."""

    def record(label, ok, detail):
        VERDICTS.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
