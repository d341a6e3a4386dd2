"""Exponential integral, logarithmic integral and the 2F1 family used by
the Riemann-Liouville covariance.

Everything here is vectorised over numpy arrays; scalar input gives a
Python float back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243
# Positive root of Ei, split into a double-double pair.
EI_ROOT_HI = 0.3725074107813666
EI_ROOT_LO = 1.3140183414386028e-17

SERIES_CUTOFF = 44.0
_ROOT_WINDOW = 0.1
_Z_SWITCH = 0.5


class DomainError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Accuracy:
    abs_tol: float = 1e-300
    rel_tol: float = 2.0**-53
    max_terms: int = 500

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_ACCURACY = Accuracy()


def _out(arr, scalar):
    return float(arr) if scalar else arr


def _root_taylor_coeffs(nterms=30):
    # Taylor coefficients of Ei around its root: Ei'(y) = e^y / y
    scale = math.exp(EI_ROOT_HI) / EI_ROOT_HI
    u = -1.0 / EI_ROOT_HI
    coeffs = []
    for n in range(nterms):
        a_n = sum(u**j / math.factorial(n - j) for j in range(n + 1))
        coeffs.append(scale * a_n / (n + 1))
    return np.array(coeffs)


_ROOT_COEFFS = _root_taylor_coeffs()


def _ei_near_root(y):
    delta = (y - EI_ROOT_HI) - EI_ROOT_LO
    acc = np.zeros_like(delta)
    for c in _ROOT_COEFFS[::-1]:
        acc = acc * delta + c
    return acc * delta


def _ei_series(y, acc: Accuracy):
    # gamma + ln|y| + sum y^k / (k k!), Neumaier-compensated
    term = y.copy()
    total = y.copy()
    comp = np.zeros_like(y)
    for k in range(2, acc.max_terms):
        term = term * y * (k - 1) / (k * k)
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        total = t
        if np.all(np.abs(term) <= acc.rel_tol * np.abs(total) + acc.abs_tol):
            break
    else:
        raise ConvergenceError("Ei power series did not converge")
    return (EULER_GAMMA + np.log(np.abs(y))) + (total + comp)


def _ei_asymptotic(y):
    # e^y / y * sum k! / y^k, truncated at the smallest term
    total = np.ones_like(y)
    term = np.ones_like(y)
    for k in range(1, 60):
        nxt = term * k / y
        done = np.abs(nxt) >= np.abs(term)
        term = np.where(done, 0.0, nxt)
        total += term
        if np.all(np.abs(term) < 1e-17 * total):
            break
    return np.exp(y) / y * total


def _e1_contfrac(x, max_iter=500):
    # E1(x) for x > 1 by the modified Lentz continued fraction
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, max_iter):
        a = -float(i * i)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h * np.exp(-x)


def ei(y, acc: Accuracy = DEFAULT_ACCURACY):
    """Exponential integral Ei(y), principal value, for real y != 0."""
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y == 0):
        raise DomainError("Ei has a logarithmic singularity at 0")
    if np.any(~np.isfinite(y)):
        raise DomainError("Ei needs finite arguments")
    out = np.empty_like(y)

    near = np.abs(y - EI_ROOT_HI) < _ROOT_WINDOW
    big = y > SERIES_CUTOFF
    negfar = y < -1.0
    mid = ~(near | big | negfar)
    if near.any():
        out[near] = _ei_near_root(y[near])
    if mid.any():
        out[mid] = _ei_series(y[mid], acc)
    if big.any():
        out[big] = _ei_asymptotic(y[big])
    if negfar.any():
        out[negfar] = -_e1_contfrac(-y[negfar])
    return _out(out[0] if scalar else out, scalar)


def _log_split(x):
    # ln x as hi + lo using extended precision where the platform has it
    lx = np.log(np.asarray(x, dtype=np.longdouble))
    hi = lx.astype(float)
    lo = (lx - hi).astype(float)
    return hi, lo


def li(x, acc: Accuracy = DEFAULT_ACCURACY):
    """Logarithmic integral Li(x) = Ei(ln x) for x > 1.

    The logarithm is split into a high and low part so rounding of ln x is
    not amplified by the steep growth of Ei; the low part enters through the
    first-order term e^y / y * lo.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 1)):
        raise DomainError("li is defined here only for x > 1")
    hi, lo = _log_split(x)
    val = ei(hi, acc) + x / hi * lo
    return _out(val[0] if scalar else val, scalar)


def _check_h(H):
    if not 0.0 < H < 1.0:
        raise DomainError(f"Hurst exponent must lie in (0, 1), got {H}")


def _series_a1(b, c, z, acc: Accuracy):
    # 2F1(1, b; c; z) = sum_n (b)_n / (c)_n z^n
    total = np.ones_like(z)
    term = np.ones_like(z)
    for n in range(acc.max_terms):
        term = term * (b + n) / (c + n) * z
        total += term
        if np.all(np.abs(term) <= acc.rel_tol * np.abs(total) + acc.abs_tol):
            return total
    raise ConvergenceError("2F1 series did not converge")


def hyp2f1_row(H, z, acc: Accuracy = DEFAULT_ACCURACY):
    """2F1(1, 1/2 - H; 3/2 + H; z) for 0 < H < 1 and 0 <= z <= 1.

    Below z = 1/2 the defining series is summed directly.  Above it the
    z -> 1 - z connection formula is used; with a = 1 and c - a = b' the
    second branch collapses to a power, leaving a single series in 1 - z.
    """
    H = float(H)
    _check_h(H)
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any((z < 0) | (z > 1)) or np.any(np.isnan(z)):
        raise DomainError("argument must lie in [0, 1]")
    if H == 0.5:
        out = np.ones_like(z)
        return _out(out[0] if scalar else out, scalar)

    b = 0.5 - H
    c = 1.5 + H
    out = np.empty_like(z)
    low = z <= _Z_SWITCH
    if low.any():
        out[low] = _series_a1(b, c, z[low], acc)
    high = ~low
    if high.any():
        w = 1.0 - z[high]
        first = (0.5 + H) / (2 * H)  # Gamma(c) Gamma(2H) / (Gamma(c-1) Gamma(1+2H))
        second = math.gamma(c) * math.gamma(-2 * H) / math.gamma(b)
        out[high] = first * _series_a1(b, 1 - 2 * H, w, acc) + second * w ** (2 * H) * z[high] ** (-c + 1)
    return _out(out[0] if scalar else out, scalar)
