import dataclasses
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from gdslab.models import integers, power_law
from gdslab.series import (ContinuationDomainError, PoleError, RangeExceededError, TermSequence, counting,
                           evaluate, partial_sum, sinc, tail_continuation)

Z = integers()
Z_GENERIC = dataclasses.replace(Z, tail_sum=None, closed_form=None)


def single_term():
    return TermSequence("one", lambda x: (np.array([1.0]) if x >= 1 else np.array([]),
                                          np.array([1.0]) if x >= 1 else np.array([])),
                        rho=1.0, beta=0.0, x_limit=1.0)


def test_counting_examples():
    c = counting(Z, 10.5)
    assert (c.A, c.main, c.R) == (10.0, 10.5, -0.5)
    assert counting(power_law(0.5), 10).A == 6.0
    assert counting(Z, 0.5).A == 0.0
    with pytest.raises(RangeExceededError, match="range exceeded"):
        counting(integers(jmax=100), 1000.0)


def test_partial_sum_examples():
    assert partial_sum(single_term(), 1.0, 0.3 + 7j) == 1.0
    ref = math.fsum(n ** -2.0 for n in range(1, 11))
    assert partial_sum(Z, 10, 2.0).real == pytest.approx(ref, rel=1e-15)
    assert abs(partial_sum(Z, 2, 1j * math.pi / math.log(2))) < 1e-15


@pytest.mark.parametrize("seq", [Z, Z_GENERIC], ids=["closed-tail", "segment"])
def test_tail_continuation_example(seq):
    r = tail_continuation(seq, 100, 2.0, tol=1e-10)
    ref = math.pi ** 2 / 6 - math.fsum(n ** -2.0 for n in range(1, 101))
    assert abs(r.value - ref) <= r.err_bound + 1e-15
    assert r.err_bound < 1e-10


def test_pole_and_domain_errors():
    with pytest.raises(PoleError, match="pole"):
        evaluate(Z, 1.0)
    with pytest.raises(ContinuationDomainError, match="continuation domain"):
        evaluate(power_law(0.5), 0.505 + 3j)


def test_evaluate_examples():
    r = evaluate(Z, 2.0)
    assert abs(r.value - math.pi ** 2 / 6) <= max(r.err_bound, 1e-15)
    r = evaluate(Z, 0.5 + 14.134725j, tol=1e-4)
    assert abs(r.value) < 0.01
    s = 0.6 + 10j
    r = evaluate(power_law(0.5), s)
    ref = complex(mpmath.zeta(0.2 + 20j))
    assert abs(r.value - ref) <= r.err_bound + 1e-12


@given(st.floats(0.55, 3.0), st.floats(-200, 200))
def test_three_routes_agree(sigma, t):
    s = complex(sigma, t)
    if abs(s - 1) < 1e-3:
        return
    a = evaluate(Z, s, tol=1e-9)
    b = evaluate(Z_GENERIC, s, tol=1e-6, max_terms=2_000_000)
    c, ce = Z.closed_form(np.array([s]))
    assert abs(a.value - c[0]) <= a.err_bound + ce[0] + 1e-12
    assert abs(b.value - a.value) <= b.err_bound + a.err_bound


@given(st.floats(0.06, 2.5), st.floats(-300, 300), st.floats(10, 1e4), st.floats(10, 1e4))
def test_continuation_consistency(sigma, t, N1, N2):
    s = complex(sigma, t)
    if abs(s - 1) < 1e-3:
        return
    r1 = evaluate(Z, s, N=N1)
    r2 = evaluate(Z, s, N=N2)
    assert abs(r1.value - r2.value) <= r1.err_bound + r2.err_bound


@given(st.floats(0.55, 2.0), st.floats(100, 1e4), st.floats(100, 1e4))
def test_continuation_consistency_segment_route(sigma, N1, N2):
    s = complex(sigma, 17.0)
    r1 = evaluate(Z_GENERIC, s, N=N1, tol=1e-6, max_terms=2_000_000)
    r2 = evaluate(Z_GENERIC, s, N=N2, tol=1e-6, max_terms=2_000_000)
    assert abs(r1.value - r2.value) <= r1.err_bound + r2.err_bound


@given(st.floats(0.1, 3.0), st.floats(0.0, 500.0))
def test_conjugate_symmetry_exact(sigma, t):
    s = complex(sigma, t)
    if abs(s - 1) < 1e-3:
        return
    a = evaluate(Z, s).value
    b = evaluate(Z, s.conjugate()).value
    assert b == a.conjugate()


def test_batching_does_not_change_values():
    s = np.array([0.7 + 3j, 0.7 + 300j, 2.0 - 50j, 0.9 + 1234.5j])
    together = evaluate(Z, s).value
    apart = np.array([evaluate(Z, x).value for x in s])
    assert np.array_equal(together, apart)


@pytest.mark.parametrize("t", [0.0, 5.0, 100.0])
def test_absolute_convergence_agreement(t):
    s = complex(1.5, t)
    r = evaluate(Z, s)
    big = partial_sum(Z, 1e6, s)
    tail = 1e6 ** -0.5 / 0.5      # sum_{n > N} n^-1.5 <= N^-0.5 / 0.5
    assert abs(r.value - big) <= r.err_bound + tail


def test_sinc_examples():
    assert sinc(0.0) == 1.0
    assert abs(sinc(math.pi)) < 1e-16
    assert sinc(1e-9) == 1.0 - 1e-18 / 6
    x = np.array([1e-5, 9.9e-5, 1.01e-4, 0.3, 30.0])
    ref = np.array([float(mpmath.sinc(v)) for v in x])
    assert np.all(np.abs(sinc(x) - ref) <= 1e-15 * np.abs(ref))


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_sinc_bound(xs):
    x = np.array(xs)
    v = sinc(x)
    with np.errstate(divide="ignore", over="ignore"):
        cap = np.minimum(1.0, 1.0 / np.abs(x))
    assert np.all(np.abs(v) <= cap * (1 + 1e-15))


def test_measured_constants_for_integers():
    assert Z.C_A == pytest.approx(1.0)
    assert Z.coeff_bound_C == pytest.approx(1.0)
