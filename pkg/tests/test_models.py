import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from gdslab import models
from gdslab.moments import limit_series
from gdslab.series import counting, evaluate


def brute_r(n):
    m = math.isqrt(n)
    return sum(1 for u in range(-m, m + 1) for v in range(-m, m + 1) if u * u + v * v == n)


def test_power_law_family():
    P = models.power_law(0.5, jmax=1000)
    n, a = P.terms(100)
    assert np.array_equal(n, np.arange(1, 11.0) ** 2)
    assert np.array_equal(a, np.arange(1, 11.0))
    assert (P.rho, P.beta) == (0.5, 0.5)
    Q = models.power_law(-1.0, jmax=1000)
    n, a = Q.terms(3.0)
    assert np.allclose(a, 1 / n)
    assert (Q.rho, Q.beta) == (2.0, 0.0)
    s = 0.4 + 5j
    r = evaluate(Q, s)
    assert abs(r.value - complex(mpmath.zeta((s + 1) / 2))) <= r.err_bound + 1e-12
    with pytest.raises(ValueError):
        models.power_law(1.0)


@given(st.floats(-2.0, 0.9), st.floats(1.0, 1e6))
def test_power_law_counting_is_exact(alpha, x):
    P = models.power_law(alpha, jmax=10**6)
    x = min(x, P.x_limit)
    n, _ = P.terms(x)
    assert np.all(n <= x)
    e = 1 / (1 - alpha)
    assert (n.size + 1) ** e > x * (1 - 1e-12)


def test_zeta_derivative_polynomial_and_limit():
    assert models.log_power_poly(1) == (-1.0, 1.0)
    assert models.log_power_poly(2) == (2.0, -2.0, 1.0)
    D = models.zeta_derivative(1)
    n, a = D.terms(5)
    assert n[0] == 2.0 and np.allclose(a, np.log(n))
    r = evaluate(D, 2.0 + 3j, tol=1e-7)
    assert abs(r.value + complex(mpmath.zeta(2 + 3j, derivative=1))) <= r.err_bound
    L = limit_series(D, 1.0, tol=1e-5)
    ref = float(mpmath.zeta(2, derivative=2))
    assert ref == pytest.approx(1.98928, abs=5e-6)
    assert abs(L.value - ref) <= L.err_est


def test_zeta_derivative_k2_against_mpmath():
    D = models.zeta_derivative(2)
    r = evaluate(D, 2.5, tol=1e-6)
    assert abs(r.value - complex(mpmath.zeta(2.5, derivative=2))) <= r.err_bound


def test_sum_two_squares():
    R = models.sum_two_squares(10**4)
    r = models.r2(10**4)
    assert (r[1], r[2], r[3], r[5]) == (4, 4, 0, 8)
    assert all(r[k] == brute_r(k) for k in range(0, 200))
    # the origin is excluded from A(x)
    assert counting(R, 10).A == 36.0
    assert abs(counting(R, 10**4).A / 10**4 - math.pi) < 0.05
    s = 3.0 + 2j
    v = evaluate(R, s, tol=1e-6)
    cf, ce = R.closed_form(np.array([s]))
    assert abs(v.value - cf[0]) <= v.err_bound + ce[0]


def test_r2_full_range_matches_brute_force():
    r = models.r2(10**4)
    rng = np.random.default_rng(0)
    for k in rng.integers(0, 10**4 + 1, size=300):
        assert r[k] == brute_r(int(k))


def test_alternating_beta():
    A = models.alternating_beta(0.5)
    n, a = A.terms(4)
    assert a[1] == pytest.approx(1 + math.sqrt(2))
    assert not A.positive
    for s in (3.0, 0.8 + 20j, 0.6 - 3j):
        r = evaluate(A, s)
        cf, ce = A.closed_form(np.array([s]))
        assert abs(r.value - cf[0]) <= r.err_bound + ce[0]
    # A(x) - x = O(x^beta) on the enumerated range
    assert A.C_A < 2.0


def test_eta_sequence():
    E = models.eta_sequence(20)
    assert (E[2], E[3], E[4], E[16]) == (1, -1, 0, 1)
    assert set(np.unique(E.prefix_sums()[:21])) <= {0, 1}


@given(st.integers(2, 70000))
def test_eta_prefix_sums_in_0_1(jmax):
    E = models.eta_sequence(jmax)
    assert set(np.unique(E.prefix_sums())) <= {0, 1}


def test_eta_modulated():
    S = models.eta_modulated(0.0, jmax=10**5)
    n, a = S.terms(20)
    full = dict(zip(n.tolist(), a.tolist()))
    assert full[1.0] == 1.0 and full[2.0] == 2.0 and 3.0 not in full
    assert all(full[float(j)] == 1.0 for j in range(4, 16))
    nn, aa = S.terms(1e5)
    A_after = np.cumsum(aa)
    assert np.max(np.abs(A_after - nn)) <= 2 and np.max(np.abs(A_after - aa - nn)) <= 2


def test_eta_weighted_sum_oracle():
    T = 300
    eta = models.eta_sequence(T)
    ref = math.fsum((1 + eta[j]) ** 2 / j for j in range(1, T + 1))
    assert models.eta_weighted_sum(T) == pytest.approx(ref, rel=1e-15)


def test_clustered_sequence():
    C = models.clustered_sequence(2, 1.0, 1000)
    n, _ = C.terms(6)
    assert np.allclose(n, [3, 10 / 3, 4, 4.25, 5, 5.2, 6])
    k0 = C.params["k0"]
    assert C.C_A <= 2 * (k0 + 1)
    nn, _ = C.terms(1000)
    gaps = np.diff(nn)
    assert np.all(gaps >= np.minimum(nn[:-1], 1000) ** -1.0 * 0.99)


def test_random_discretize_linear():
    seq = models.random_discretize(models.linear_mass, 500, 11, 502.0)
    again = models.random_discretize(models.linear_mass, 500, 11, 502.0)
    n, _ = seq.terms(seq.x_limit)
    n2, _ = again.terms(again.x_limit)
    assert np.array_equal(n, n2)
    j = np.arange(1, n.size + 1)
    assert np.all((n > j) & (n <= j + 1 + 1e-9))
    other = models.random_discretize(models.linear_mass, 500, 12, 502.0)
    assert not np.array_equal(n, other.terms(other.x_limit)[0])


def test_uniform_stream_is_counter_based():
    full = models.uniform_stream(5, np.arange(1, 101))
    part = models.uniform_stream(5, np.arange(51, 101))
    assert np.array_equal(full[50:], part)
    assert np.all((full > 0) & (full <= 1))


def test_random_discretize_range_error():
    with pytest.raises(ValueError, match="does not reach"):
        models.random_discretize(models.linear_mass, 1000, 1, 50.0)
