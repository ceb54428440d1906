"""Euler-Maclaurin evaluation of power-sum tails, Hurwitz and Riemann zeta.

These are the closed-form continuations used by the lattice-type models
(integers, power laws, r(n)); everything is vectorised over complex ``s``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli

_MAX_TERMS = 60
# B_{2k} / (2k)!, k = 1.._MAX_TERMS + 1
_B = bernoulli(2 * _MAX_TERMS + 2)
_BK = np.array([_B[2 * k] / math.factorial(2 * k) for k in range(1, _MAX_TERMS + 2)])


def power_tail(w, J: float, a: float = 0.0, rtol: float = 1e-15):
    """``sum_{j > J} (j + a)^(-w)`` continued analytically to ``w != 1``.

    ``J`` (scalar or array broadcastable with ``w``) is a non-negative integer
    index (the sum runs over integers ``j >= J + 1``) and ``J + a > 0``. Returns ``(value, err_bound)`` with the
    standard Euler-Maclaurin remainder bound. Accuracy requires
    ``J + a`` large compared with ``|w| / (2 pi)``; the caller picks ``J``.
    """
    w = np.asarray(w, dtype=complex)
    x0 = np.asarray(J, dtype=float) + a
    if np.any(x0 <= 0):
        raise ValueError("power_tail needs J + a > 0")
    w, x0 = np.broadcast_arrays(w, x0)
    lx = np.log(x0)
    xw = np.exp(-w * lx)                      # x0^{-w}
    with np.errstate(divide="ignore", invalid="ignore"):
        val = x0 * xw / (w - 1.0) - 0.5 * xw
    sig = w.real
    rising = w.copy()                          # (w)_{2k-1}
    xpow = xw / x0                             # x0^{-w-2k+1}
    err = np.full(w.shape, np.inf)
    val = np.array(val, dtype=complex)
    mag = np.abs(x0 * xw / (w - 1.0)) + 0.5 * np.abs(xw)
    inv_x2 = 1.0 / (x0 * x0)
    for k in range(1, _MAX_TERMS + 1):
        term = _BK[k - 1] * rising * xpow
        val = val + term
        mag = mag + np.abs(term)
        # remainder after k terms: |first omitted term| * |w+2k+1| / (sig+2k+1)
        nxt = rising * (w + 2 * k - 1) * (w + 2 * k)
        bound_den = np.maximum(sig + 2 * k + 1, 1e-300)
        cand = np.abs(_BK[k] * nxt * (w + 2 * k + 1)) * np.abs(xpow) * inv_x2 / bound_den
        cand = np.where(sig + 2 * k + 1 > 0, cand, np.inf)
        err = np.minimum(err, cand)
        if np.all(err <= rtol * np.maximum(np.abs(val), 1e-300)):
            break
        rising = nxt
        xpow = xpow * inv_x2
    # rounding: each term carries exp(-w log x0) and a k-fold product
    err = err + 2.0 * np.finfo(float).eps * (4.0 + 2.0 * k + np.abs(w) * np.abs(lx)) * mag
    return val, err


def _default_cut(t_abs, a: float) -> int:
    return int(max(16.0, 0.5 * t_abs + 16.0) - a) + 1


def hurwitz_zeta(s, a: float = 1.0, cut: int | None = None, rtol: float = 1e-15):
    """Hurwitz zeta ``sum_{n >= 0} (n + a)^(-s)`` for complex ``s != 1``, ``0 < a <= 1``.

    Direct summation of the first ``cut`` terms plus the Euler-Maclaurin
    tail. Returns ``(value, err_bound)`` arrays.
    """
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    if cut is None:
        cut = _default_cut(float(np.max(np.abs(s.imag), initial=0.0)), a)
    logs = np.log(np.arange(cut, dtype=float) + a)
    out = np.empty(s.size, dtype=complex)
    step = max(1, (1 << 20) // max(cut, 1))
    for i in range(0, s.size, step):
        block = s[i:i + step]
        out[i:i + step] = np.exp(-np.outer(block, logs)).sum(axis=1)
    tail, err = power_tail(s, cut - 1, a=a, rtol=rtol)
    err = err + _direct_rounding(s, cut, a)
    return (out + tail).reshape(shape), err.reshape(shape)


def _direct_rounding(s, cut: int, a: float):
    """Rounding of ``sum_{n<cut} (n+a)^-s`` via a majorant of ``sum (n+a)^-sigma``."""
    sig = s.real
    top = cut - 1 + a
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        near_one = np.abs(sig - 1.0) < 1e-8
        integral = np.where(near_one, math.log(top / a) if top > a else 0.0,
                            (top ** (1.0 - sig) - a ** (1.0 - sig)) / (1.0 - sig))
    mag = np.where(sig >= 0, a ** (-sig) + np.maximum(integral, 0.0), cut * top ** (-sig))
    return np.finfo(float).eps * (8.0 + 2.0 * np.abs(s) * math.log(max(top, 2.0))) * mag


def riemann_zeta(s, cut: int | None = None):
    """Riemann zeta via Euler-Maclaurin; returns ``(value, err_bound)``."""
    return hurwitz_zeta(s, 1.0, cut)


def dirichlet_beta(s):
    """``L(s, chi_4) = 1 - 3^-s + 5^-s - ...`` via Hurwitz zeta at 1/4 and 3/4."""
    s = np.asarray(s, dtype=complex)
    z1, e1 = hurwitz_zeta(s, 0.25)
    z3, e3 = hurwitz_zeta(s, 0.75)
    scale = np.exp(-s * math.log(4.0))
    return scale * (z1 - z3), np.abs(scale) * (e1 + e3)
