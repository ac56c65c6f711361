import math

import numpy as np
import pytest
from scipy.integrate import quad

from fieldmatter.errors import DomainError, NumericalError
from fieldmatter.numerics import (GK_NODES, GK_WEIGHTS, G_WEIGHTS, fit_log_power, fit_power_law,
                                  gauss_kronrod, integrate_interval, integrate_semi_infinite)


def test_kronrod_exact_to_degree_22():
    for p in range(0, 23):
        assert np.dot(GK_WEIGHTS, GK_NODES ** p) == pytest.approx(
            (1 - (-1) ** (p + 1)) / (p + 1), abs=1e-14)


def test_gauss_exact_to_degree_13():
    for p in range(0, 14):
        assert np.dot(G_WEIGHTS, GK_NODES ** p) == pytest.approx(
            (1 - (-1) ** (p + 1)) / (p + 1), abs=1e-14)


def test_gauss_kronrod_panel():
    val, err = gauss_kronrod(np.cos, 0.0, 1.0)
    assert val[0] == pytest.approx(math.sin(1.0), abs=1e-15)
    assert err[0] < 1e-12


@pytest.mark.parametrize("f, truth", [
    (lambda w: np.exp(-w), 1.0),
    (lambda w: 1.0 / (w * w + 1.0), math.pi / 2),
    (lambda w: 1.0 / (w * w + 4 * math.pi), math.pi / (2 * math.sqrt(4 * math.pi))),
])
def test_semi_infinite_examples(f, truth):
    res = integrate_semi_infinite(f, 1e-10)
    assert res.value == pytest.approx(truth, abs=1e-10)
    assert res.error_estimate >= 0
    assert res.evaluations > 0


def test_semi_infinite_against_quad_with_scales():
    def f(w):
        return 1.0 / ((w * w + 1e-4) * (1.0 + w))

    ref = quad(f, 0, np.inf, epsabs=0, epsrel=1e-13, limit=500, points=None)[0]
    res = integrate_semi_infinite(f, 1e-11, breakpoints=[1e-2, 1.0])
    assert res.value == pytest.approx(ref, rel=1e-9)


def test_semi_infinite_deterministic():
    f = lambda w: w / (w ** 3 + 2.0)  # noqa: E731
    a = integrate_semi_infinite(f, 1e-9)
    b = integrate_semi_infinite(f, 1e-9)
    assert a == b


@pytest.mark.parametrize("f", [lambda w: np.exp(-w), lambda w: 1.0 / (w * w + 1.0)])
def test_halving_tol_never_raises_error_estimate(f):
    errs = [integrate_semi_infinite(f, tol).error_estimate for tol in (1e-4, 5e-5, 2.5e-5, 1e-6)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_semi_infinite_budget_exhausted():
    with pytest.raises(NumericalError) as info:
        integrate_semi_infinite(lambda w: 1.0 / np.sqrt(np.abs(w - 0.3)), 1e-14, max_panels=40)
    assert info.value.partial is not None


def test_semi_infinite_rejects_bad_tol():
    with pytest.raises(DomainError):
        integrate_semi_infinite(np.exp, 0.0)


def test_interval():
    assert integrate_interval(np.sin, 0, math.pi, 1e-12).value == pytest.approx(2.0, abs=1e-12)


def test_power_law_exact():
    x = np.geomspace(1, 100, 10)
    fit = fit_power_law(x, 7 * x ** -4.0)
    assert fit.exponent == pytest.approx(-4, abs=1e-9)
    assert fit.prefactor == pytest.approx(7, rel=1e-9)
    assert 0 <= fit.r_squared <= 1


def test_power_law_with_offset():
    x = np.geomspace(1, 10, 12)
    fit = fit_power_law(x, 3 + 7 * x ** -4.0, offset=True)
    assert fit.exponent == pytest.approx(-4, abs=1e-6)
    assert fit.offset == pytest.approx(3, abs=1e-8)


def test_power_law_subleading():
    x = np.geomspace(10, 100, 10)
    assert fit_power_law(x, x ** -4.0 * (1 + 0.1 / x)).exponent == pytest.approx(-4, abs=0.05)


def test_power_law_scale_invariance():
    x = np.geomspace(2, 50, 8)
    y = 5 * x ** -2.5 * (1 + 0.3 / x)
    assert fit_power_law(3.7 * x, y).exponent == pytest.approx(fit_power_law(x, y).exponent,
                                                                abs=1e-9)


def test_power_law_rejects_non_positive():
    with pytest.raises(DomainError):
        fit_power_law([1, 2, 3], [1, -1, 2])


@pytest.mark.parametrize("a, b, p", [(0.0, 2.0, 3.0), (1.0, 0.5, 2.0)])
def test_log_power_exact(a, b, p):
    L = np.geomspace(1e2, 1e6, 9)
    fit = fit_log_power(L, a + b * np.log(L) ** p)
    assert fit.exponent == pytest.approx(p, abs=1e-6)
    assert fit.prefactor == pytest.approx(b, rel=1e-5)


def test_log_power_subleading():
    L = np.geomspace(1e2, 1e6, 9)
    x = np.log(L)
    assert fit_log_power(L, x ** 3 + x).exponent == pytest.approx(3, abs=0.3)


def test_log_power_rejects_small_cutoffs():
    with pytest.raises(DomainError):
        fit_log_power([0.5, 2, 3], [1, 2, 3])


def test_parallel_map_preserves_order():
    from fieldmatter.parallel import parallel_map
    items = list(range(20))
    assert parallel_map(math.factorial, items, workers=2) == [math.factorial(i) for i in items]
    assert parallel_map(math.factorial, [], workers=3) == []
