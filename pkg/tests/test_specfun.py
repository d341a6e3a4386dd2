import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from primefbm.specfun import EULER_GAMMA, Accuracy, DomainError, ei, hyp2f1_row, li

mpmath.mp.dps = 30

# frozen from mpmath at 30 digits
EI_1 = 1.895117816355936755466520934
LI_2 = 1.045163780117492784844588889
LI_1E6 = 78627.54915946218191986291
LI_1E12 = 37607950280.80486548953493


def test_ei_examples():
    assert ei(1.0) == pytest.approx(EI_1, rel=1e-14)
    r = ei(20.0) / (math.exp(20.0) / 20.0)
    assert 1.05 < r < 1.06


@pytest.mark.parametrize("y", [1e-3, 1e-5, 1e-8])
def test_ei_small_argument(y):
    assert ei(y) - math.log(y) - EULER_GAMMA == pytest.approx(y, rel=1e-3)


def test_ei_relative_error_on_grid():
    ys = np.concatenate([np.linspace(0.1, 100.0, 1500), [0.3725, 0.37251, 43.999, 44.0, 44.001]])
    got = ei(ys)
    ref = np.array([float(mpmath.ei(mpmath.mpf(float(y)))) for y in ys])
    assert np.max(np.abs(got / ref - 1)) < 1e-13


def test_ei_negative_side():
    ys = np.array([-0.05, -0.9, -1.5, -7.0, -30.0])
    ref = np.array([float(mpmath.ei(float(y))) for y in ys])
    assert np.allclose(ei(ys), ref, rtol=1e-13, atol=0)


def test_ei_domain():
    with pytest.raises(DomainError):
        ei(0.0)


def test_li_examples():
    assert li(2.0) == pytest.approx(LI_2, rel=1e-14)
    assert abs(li(1e6) - LI_1E6) < 1e-8
    assert abs(li(1e12) - LI_1E12) < 1e-4


def test_li_absolute_error_budget():
    xs = np.logspace(0.05, 12, 300)
    ref = np.array([float(mpmath.li(mpmath.mpf(float(x)))) for x in xs])
    assert np.max(np.abs(li(xs) - ref)) <= 1e-4


def test_li_increasing():
    vals = li(np.array([2.0] + [10.0**k for k in range(1, 10)]))
    assert np.all(np.diff(vals) > 0)


def test_li_derivative():
    xs = np.logspace(0.5, 11, 25)
    h = xs * 1e-6
    deriv = (li(xs + h) - li(xs - h)) / (2 * h)
    assert np.allclose(deriv, 1 / np.log(xs), rtol=1e-6)


def test_li_domain():
    with pytest.raises(DomainError):
        li(1.0)
    with pytest.raises(DomainError):
        li(np.array([3.0, 0.5]))


def test_hyp2f1_special_values():
    for H in (0.1, 0.3, 0.7, 0.9):
        assert hyp2f1_row(H, 0.0) == 1.0
        assert hyp2f1_row(H, 1.0) == pytest.approx((H + 0.5) / (2 * H), rel=1e-14)
    assert np.all(hyp2f1_row(0.5, np.linspace(0, 1, 11)) == 1.0)


def test_hyp2f1_variance_identity():
    for H in np.round(np.arange(0.05, 0.951, 0.05), 2):
        assert abs(2 * H / (H + 0.5) * hyp2f1_row(H, 1.0) - 1) < 1e-10


def test_hyp2f1_against_mpmath():
    zs = np.concatenate([np.linspace(0, 1, 201), [0.98, 0.999, 1 - 1e-9]])
    for H in (0.05, 0.2, 0.37, 0.45, 0.55, 0.8, 0.95):
        got = hyp2f1_row(H, zs)
        ref = np.array([float(mpmath.hyp2f1(1, 0.5 - H, 1.5 + H, z)) for z in zs])
        assert np.max(np.abs(got / ref - 1)) < 1e-10, H


def test_hyp2f1_against_kernel_quadrature():
    # 2H int_0^t (t-u)^(H-1/2) (s-u)^(H-1/2) du with t = z, s = 1, rescaled
    rng = np.random.default_rng(5)
    for H, z in zip(rng.uniform(0.05, 0.95, 50), rng.uniform(0.01, 1.0, 50)):
        val, _ = integrate.quad(lambda u: (1 - u) ** (H - 0.5), 0, z, weight="alg",
                                wvar=(0, H - 0.5), epsabs=0, epsrel=1e-13, limit=200)
        cov = 2 * H * val
        expect = cov / (2 * H / (H + 0.5) * z ** (H + 0.5))
        assert hyp2f1_row(H, z) == pytest.approx(expect, rel=1e-8)


def test_hyp2f1_domain():
    for H in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            hyp2f1_row(H, 0.5)
    with pytest.raises(DomainError):
        hyp2f1_row(0.3, 1.2)


def test_accuracy_validation():
    with pytest.raises(ValueError):
        Accuracy(abs_tol=0)
    with pytest.raises(ValueError):
        Accuracy(max_terms=0)
