import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from gdslab.zeta import dirichlet_beta, hurwitz_zeta, power_tail, riemann_zeta


def mp_zeta(s, a=1):
    with mpmath.workdps(40):
        return complex(mpmath.zeta(mpmath.mpc(s), a))


@pytest.mark.parametrize("s", [2.0, 0.5 + 14.134725j, 0.75 + 1000j, -1.5 + 3j, 3 - 40j, 0.2 + 20j])
def test_riemann_zeta_against_mpmath(s):
    v, e = riemann_zeta(np.array([s]))
    ref = mp_zeta(s)
    assert abs(v[0] - ref) <= e[0]


def test_catalan_and_hurwitz():
    v, _ = dirichlet_beta(np.array([2.0]))
    assert v[0].real == pytest.approx(float(mpmath.catalan), rel=1e-14)
    h, _ = hurwitz_zeta(np.array([1.5 + 2j]), 0.25)
    assert abs(h[0] - mp_zeta(1.5 + 2j, mpmath.mpf(1) / 4)) < 1e-13


@given(st.floats(1.2, 4.0), st.floats(-60, 60), st.integers(20, 500))
def test_power_tail_error_bound(sig, t, J):
    w = complex(sig, t)
    v, e = power_tail(np.array([w]), J)
    ref = mp_zeta(w, J + 1)
    assert abs(v[0] - ref) <= e[0] + 1e-14 * abs(ref) + 1e-300


def test_power_tail_rejects_nonpositive_start():
    with pytest.raises(ValueError):
        power_tail(np.array([2.0]), 0)
