"""Generate the zeta-zero ordinate fixture used by the explicit-formula tests.

Zeros are located as sign changes of the Riemann-Siegel Z function on a
fine grid and refined by bisection.  Z is evaluated with the main sum plus
the C0, C1, C2 correction terms; the first zeros, where the asymptotic
corrections are weakest, come from mpmath directly.  A sample of ordinates
is checked against mpmath.zetazero before the file is written.

    python tools/make_zeta_zeros.py tests/data/zeta_zeros_10k.txt 10000
"""
import sys

import mpmath
import numpy as np
import sympy as sp

N_EXACT = 50
STEP = 0.01


def _psi_derivatives():
    # Psi and its derivatives have removable singularities at p = 1/4, 3/4;
    # evaluate them in high precision and keep Chebyshev fits for numpy use.
    p = sp.symbols("p")
    psi = sp.cos(2 * sp.pi * (p**2 - p - sp.Rational(1, 16))) / sp.cos(2 * sp.pi * p)
    nodes = 0.5 - 0.5 * np.cos(np.pi * (np.arange(400) + 0.5) / 400)
    fits = []
    d = psi
    with mpmath.workdps(60):
        for k in range(7):
            f = sp.lambdify(p, d, "mpmath")
            vals = [float(f(mpmath.mpf(float(x)))) for x in nodes]
            fits.append(np.polynomial.Chebyshev.fit(nodes, vals, 60, domain=[0, 1]))
            d = sp.diff(d, p)
    return fits


_PSI = _psi_derivatives()


def _psi(k, p):
    return _PSI[k](p)


def theta(t):
    return (
        t / 2 * np.log(t / (2 * np.pi))
        - t / 2
        - np.pi / 8
        + 1 / (48 * t)
        + 7 / (5760 * t**3)
        + 31 / (80640 * t**5)
    )


def siegel_z(t):
    t = np.asarray(t, dtype=float)
    a = np.sqrt(t / (2 * np.pi))
    nmax = np.floor(a).astype(int)
    th = theta(t)
    total = np.zeros_like(t)
    for n in range(1, int(nmax.max()) + 1):
        use = nmax >= n
        total += np.where(use, np.cos(th - t * np.log(n)) / np.sqrt(n), 0.0)
    frac = a - nmax
    c0 = _psi(0, frac)
    c1 = -_psi(3, frac) / (96 * np.pi**2)
    c2 = _psi(2, frac) / (64 * np.pi**2) + _psi(6, frac) / (18432 * np.pi**4)
    sign = np.where(nmax % 2 == 1, 1.0, -1.0)
    rem = sign * a**-0.5 * (c0 + c1 / a + c2 / a**2)
    return 2 * total + rem


def find_zeros(count):
    exact = [float(mpmath.zetazero(n).imag) for n in range(1, N_EXACT + 1)]
    start = exact[-1] + 0.5 * (float(mpmath.zetazero(N_EXACT + 1).imag) - exact[-1])
    found = []
    lo = start
    while len(exact) + len(found) < count:
        grid = np.arange(lo, lo + 500.0, STEP)
        z = siegel_z(grid)
        idx = np.flatnonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)
        a, b = grid[idx], grid[idx + 1]
        za = z[idx]
        for _ in range(50):
            mid = 0.5 * (a + b)
            zm = siegel_z(mid)
            left = np.sign(zm) == np.sign(za)
            a = np.where(left, mid, a)
            za = np.where(left, zm, za)
            b = np.where(left, b, mid)
        found.extend((0.5 * (a + b)).tolist())
        lo = grid[-1]
    return np.array((exact + found)[:count])


def main(path, count):
    zeros = find_zeros(count)
    assert np.all(np.diff(zeros) > 0)
    for n in sorted({1, N_EXACT + 1, count // 10, count // 2, count}):
        ref = float(mpmath.zetazero(n).imag)
        err = abs(zeros[n - 1] - ref)
        print(f"zero {n}: {zeros[n - 1]:.9f} vs mpmath {ref:.9f} (err {err:.2e})")
        if err > 1e-6:
            raise SystemExit(f"zero {n} off by {err}")
    with open(path, "w") as fh:
        for g in zeros:
            fh.write(f"{g:.9f}\n")


if __name__ == "__main__":
    main(sys.argv[1], int(sys.argv[2]))
