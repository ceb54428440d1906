import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from gdslab import models
from gdslab.moments import (DivergentSeriesError, fejer_mean_square, growth_fit, limit_series,
                            mean_square_quadrature, moment_scan, mv_check, polynomial_evaluator,
                            polynomial_mean_square_exact)
from gdslab.series import sinc

Z = models.integers()


@st.composite
def polynomials(draw, max_len=12):
    k = draw(st.integers(1, max_len))
    n = draw(st.lists(st.integers(1, 60), min_size=k, max_size=k, unique=True))
    a = draw(st.lists(st.floats(-2, 2), min_size=k, max_size=k))
    return np.array(sorted(n), dtype=float), np.array(a)


def test_two_term_exact_value():
    n, a = np.array([1.0, 2.0]), np.array([1.0, 1.0])
    T = 10.0
    r = polynomial_mean_square_exact((n, a), 2, 0.0, T)
    assert r.value == pytest.approx(2 + 2 * math.sin(T * math.log(2)) / (T * math.log(2)), rel=1e-14)


@settings(max_examples=30)
@given(polynomials(), st.floats(0.0, 1.5), st.floats(1.0, 40.0))
def test_exact_equals_quadrature(poly, sigma, T):
    n, a = poly
    ex = polynomial_mean_square_exact((n, a), math.inf, sigma, T)
    q = mean_square_quadrature((n, a), sigma, -T, T)
    assert abs(ex.value - q.value / (2 * T)) <= 1e-6 * abs(ex.value) + ex.err_est + q.err_est / (2 * T) + 1e-12


@settings(max_examples=30)
@given(polynomials(), st.floats(0.0, 1.5), st.floats(0.5, 40.0))
def test_fejer_dominates(poly, sigma, T):
    n, a = poly
    ex = polynomial_mean_square_exact((n, a), math.inf, sigma, T)
    fj = fejer_mean_square((n, a), math.inf, sigma, T)
    assert fj.value >= ex.value - ex.err_est - fj.err_est


@pytest.mark.parametrize("u", [0.0, 0.3, 1.7, 5.0])
def test_fejer_kernel_constant(u):
    T = 3.0
    ref = quad(lambda t: (1 - abs(t) / (2 * T)) * math.cos(u * t), -2 * T, 2 * T, limit=200)[0] / T
    assert ref == pytest.approx(2 * float(sinc(T * u)) ** 2, abs=1e-12)


def test_diagonal_limit_of_exact_mean():
    rng = np.random.default_rng(1)
    n = np.arange(1.0, 31.0)
    a = rng.uniform(-1, 1, n.size)
    c = a * n ** -0.5
    diag = float(np.sum(c * c))
    T = 1e5
    r = polynomial_mean_square_exact((n, a), math.inf, 0.5, T)
    off = sum(abs(c[j] * c[k]) / (T * math.log(n[k] / n[j])) for j in range(n.size) for k in range(j + 1, n.size))
    assert abs(r.value - diag) <= 2 * off + r.err_est


def test_limit_series_integers():
    r = limit_series(Z, 1.0, tol=1e-8)
    assert abs(r.value - math.pi ** 2 / 6) <= r.err_est
    r = limit_series(Z, 0.75, tol=1e-4)
    assert abs(r.value - 2.612375348685488) <= r.err_est
    with pytest.raises(DivergentSeriesError, match="divergent"):
        limit_series(Z, 0.5)


def test_limit_series_polynomial_is_exact():
    r = limit_series((np.array([1.0, 4.0]), np.array([1.0, 2.0])), 0.5)
    assert r.value == pytest.approx(2.0, rel=1e-15)


def test_quadrature_of_zeta_against_exact_route():
    # for sigma > 1 the truncated polynomial and the full series differ by a small tail
    sigma, T = 2.0, 20.0
    full = mean_square_quadrature(Z, sigma, -T, T).value / (2 * T)
    n, a = Z.terms(2000)
    ex = polynomial_mean_square_exact((n, a), math.inf, sigma, T)
    tail = 2 * 2000 ** -1.0 * math.pi ** 2 / 6 + 2000 ** -2.0
    assert abs(full - ex.value) <= tail


def test_pole_guard():
    with pytest.raises(ValueError, match="pole"):
        mean_square_quadrature(Z, 1.0, 0.0, 5.0)
    r = mean_square_quadrature(Z, 1.0, 1.0, 5.0)
    assert r.value > 0


def test_moment_scan_consistency():
    poly = (np.arange(1.0, 11.0), np.ones(10))
    scan = moment_scan(poly, 0.5, [5.0, 10.0, 20.0])
    single = mean_square_quadrature(poly, 0.5, 0.0, 20.0)
    assert scan[-1].value == pytest.approx(single.value / 20.0, rel=1e-8)
    with pytest.raises(ValueError):
        moment_scan(poly, 0.5, [5.0, 4.0])


@settings(max_examples=25)
@given(st.integers(2, 8), st.integers(0, 2 ** 31))
def test_mv_inequality_holds(k, seed):
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.uniform(0, 10, k))
    if np.min(np.diff(lam)) < 1e-3:
        return
    a = rng.normal(size=k) + 1j * rng.normal(size=k)
    rep = mv_check(lam, a, 100.0)
    assert rep.holds and abs(rep.theta) <= 1 + rep.err_est / rep.bound


def test_mv_validation():
    with pytest.raises(ValueError, match="duplicate"):
        mv_check([1.0, 1.0], [1.0, 2.0], 10.0)
    rep = mv_check([0.5], [2.0], 10.0)
    assert rep.lhs == pytest.approx(40.0) and rep.bound == 0.0


def test_growth_fit():
    pts = [(T, 3.0 * T ** 0.8) for T in (10.0, 30.0, 100.0, 300.0)]
    slope, icpt, rms = growth_fit(pts)
    assert slope == pytest.approx(0.8, abs=1e-12) and icpt == pytest.approx(math.log(3.0)) and rms < 1e-12
    with pytest.raises(ValueError):
        growth_fit(pts[:2])


def test_polynomial_evaluator_matches_direct():
    f = polynomial_evaluator([1.0, 2.0, 3.0], [1.0, -1.0, 0.5])
    s = 0.3 + 4j
    v, e = f(s)
    assert abs(v[0] - (1 - 2 ** -s + 0.5 * 3 ** -s)) <= e[0] + 1e-15


def test_absolute_region_mean_is_zeta_4():
    # the diagonal sum_n n^-4 is the mean of |zeta(2+it)|^2
    r = mean_square_quadrature(Z, 2.0, 0.0, 50.0)
    assert abs(r.value / 50.0 / (math.pi ** 4 / 90) - 1) < 0.02


def test_fejer_sinc_zero_example():
    T = math.pi / math.log(2)
    r = fejer_mean_square((np.array([1.0, 2.0]), np.array([1.0, 1.0])), 2, 0.0, T)
    assert r.value == pytest.approx(2 * 2.0, abs=1e-15)


def test_fejer_single_term_constant():
    T = 7.0
    r = fejer_mean_square((np.array([3.0]), np.array([2.0])), 3, 0.5, T)
    kernel_mass = quad(lambda t: 1 - abs(t) / (2 * T), -2 * T, 2 * T)[0] / T
    assert r.value == pytest.approx(kernel_mass * 4.0 / 3.0, rel=1e-14)


def test_power_law_limit_is_zeta_1_2():
    r = limit_series(models.power_law(0.5), 0.8, tol=1e-3)
    assert abs(r.value - 5.591582441177751) <= r.err_est
