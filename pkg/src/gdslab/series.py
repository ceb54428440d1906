"""General Dirichlet series models and their evaluation in the strip.

A :class:`TermSequence` bundles the terms ``(n_j, a_j)`` with the density
metadata of ``A(x) = x P(log x) + O(x^beta (log x)^q)``. :func:`evaluate`
computes ``f(s)`` for ``sigma > beta`` as a partial sum plus the continued
tail

    f(s) - f_N(s) = int_N^inf Q(log x) x^-s dx - R(N) N^-s + s int_N^inf R(x) x^(-s-1) dx,

where ``Q = P + P'`` and ``R(x) = A(x) - x P(log x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gamma as _gamma, gammaincc

EPS = np.finfo(float).eps
_MAX_CELLS = 1 << 21          # complex entries per dense block
DEFAULT_MARGIN = 0.01
DEFAULT_MAX_TERMS = 20_000_000


class RangeExceededError(ValueError):
    """The model cannot enumerate terms up to the requested ``x``."""


class ContinuationDomainError(ValueError):
    """``sigma`` is not safely to the right of ``beta``."""


class PoleError(ValueError):
    """Evaluation requested at the pole ``s = 1``."""


Enumerator = Callable[[float], "tuple[np.ndarray, np.ndarray]"]


@dataclass(frozen=True, eq=False)
class TermSequence:
    """Terms ``n_1 < n_2 < ...`` with weights ``a_j`` and counting-function metadata.

    ``enumerate_up_to(x)`` returns the arrays ``(n, a)`` of all terms with
    ``n_j <= x`` in increasing order. ``main_term_poly`` holds the
    coefficients of ``P`` in powers of ``log x`` (constant term first);
    it defaults to ``(rho,)``.

    ``tail_sum(N, s)`` may supply a closed-form continuation of
    ``sum_{n_j > N} a_j n_j^-s`` (lattice-type models); ``closed_form(s)``
    an independent analytic identity for ``f``. Both return
    ``(value, err)`` arrays.

    ``coeff_bound_C`` and ``C_A`` are measured over the enumerable range up
    to ``diagnostic_x`` when not given; they are empirical constants.
    """

    name: str
    enumerate_up_to: Enumerator
    rho: float
    beta: float
    main_term_poly: tuple[float, ...] | None = None
    q: float = 0.0
    x_limit: float = math.inf
    tail_sum: Callable | None = None
    closed_form: Callable | None = None
    positive: bool = True
    params: dict = field(default_factory=dict)
    diagnostic_x: float = 1e5
    coeff_bound_C: float | None = None
    C_A: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if self.main_term_poly is None:
            object.__setattr__(self, "main_term_poly", (float(self.rho),))
        if self.coeff_bound_C is None or self.C_A is None:
            C, CA = measure_constants(self, min(self.x_limit, self.diagnostic_x))
            if self.coeff_bound_C is None:
                object.__setattr__(self, "coeff_bound_C", C)
            if self.C_A is None:
                object.__setattr__(self, "C_A", CA)

    @property
    def degree(self) -> int:
        return len(self.main_term_poly) - 1

    @property
    def pole_order(self) -> int:
        """Order of the pole of ``f`` at ``s = 1`` implied by the main term."""
        return len(self.main_term_poly) if any(self.main_term_poly) else 0

    def terms(self, x: float):
        if x > self.x_limit * (1 + 1e-12):
            raise RangeExceededError(
                f"{self.name}: range exceeded, model enumerates only up to {self.x_limit:g} (asked {x:g})")
        n, a = self.enumerate_up_to(x)
        return np.asarray(n, dtype=float), np.asarray(a, dtype=float)

    def main_term(self, x):
        """``x P(log x)`` (zero for ``x <= 0``)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.where(x > 0, x, 1.0))
        p = np.polynomial.polynomial.polyval(lx, self.main_term_poly)
        return np.where(x > 0, x * p, 0.0)

    def density_poly(self) -> np.ndarray:
        """Coefficients of ``Q = P + P'``, the density of the main term in ``log x``."""
        P = np.asarray(self.main_term_poly, dtype=float)
        dP = np.polynomial.polynomial.polyder(P) if P.size > 1 else np.zeros(1)
        Q = P.copy()
        Q[: dP.size] += dP
        return Q


def measure_constants(seq: TermSequence, x_max: float) -> tuple[float, float]:
    """Empirical ``C`` (coefficient bound) and ``C_A`` (remainder bound) on ``[1, x_max]``."""
    if not math.isfinite(x_max) or x_max < 1:
        return math.nan, math.nan
    n, a = seq.enumerate_up_to(x_max)
    n = np.asarray(n, dtype=float)
    a = np.asarray(a, dtype=float)
    sel = n >= 1.0
    if not np.any(sel):
        return math.nan, math.nan

    def scale(x):
        return x ** seq.beta * np.log(x + 2.0) ** seq.q

    C = float(np.max(np.abs(a[sel]) / scale(n[sel])))
    A_after = np.cumsum(a)
    A_before = A_after - a
    main = seq.main_term(n)
    r = np.concatenate([np.abs(A_after - main)[sel], np.abs(A_before - main)[sel]])
    xs = np.concatenate([n[sel], n[sel]])
    ratios = r / scale(xs)
    end = abs(float(A_after[-1]) - float(seq.main_term(x_max))) / float(scale(np.array(x_max)))
    return C, float(max(np.max(ratios), end))


@dataclass(frozen=True)
class CountingSnapshot:
    x: float
    A: float
    main: float
    R: float


@dataclass
class EvalResult:
    """Value of ``f(s)`` (or of a tail) with an error bound and the cutoffs used.

    Fields are scalars for scalar input and arrays for array input.
    ``X_max`` is ``inf`` when the tail came from a closed form.
    """

    value: complex | np.ndarray
    err_bound: float | np.ndarray
    N_cut: float | np.ndarray
    X_max: float | np.ndarray
    method: str = "segment-integral"


def counting(seq: TermSequence, x: float) -> CountingSnapshot:
    """Exact ``A(x) = sum_{n_j <= x} a_j`` and ``R(x) = A(x) - x P(log x)``."""
    if x < 0:
        raise ValueError("counting needs x >= 0")
    _, a = seq.terms(x)
    A = math.fsum(a.tolist())
    main = float(seq.main_term(x))
    return CountingSnapshot(float(x), A, main, A - main)


def sinc(x):
    """``sin(x)/x`` with ``sinc(0) = 1``; Taylor branch near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# dense Dirichlet sums
# --------------------------------------------------------------------------

def dirichlet_sum(n, a, s, lo=None, hi=None):
    """``sum_{lo_i <= j < hi_i} a_j n_j^{-s_i}`` for each ``s_i``.

    ``lo``/``hi`` are per-``s`` index ranges into the term arrays (default
    all terms). Each row is reduced over exactly its own slice so the
    result does not depend on how ``s`` values are batched, and negative
    ``t`` is computed as the conjugate of ``+|t|``.
    Returns ``(values, abs_sums)`` where ``abs_sums = sum |a_j| n_j^-sigma``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    n = np.asarray(n, dtype=float)
    a = np.asarray(a, dtype=float)
    m = s.size
    J = n.size
    lo = np.zeros(m, dtype=np.int64) if lo is None else np.broadcast_to(np.asarray(lo, dtype=np.int64), (m,))
    hi = np.full(m, J, dtype=np.int64) if hi is None else np.broadcast_to(np.asarray(hi, dtype=np.int64), (m,))
    vals = np.zeros(m, dtype=complex)
    abss = np.zeros(m)
    if J == 0 or m == 0:
        return vals, abss
    logn = np.log(n)
    sig = s.real
    tabs = np.abs(s.imag)
    flip = s.imag < 0
    order = np.argsort(hi, kind="stable")
    start = 0
    while start < m:
        # grow the block while the dense footprint stays bounded
        stop = start + 1
        jmax = int(hi[order[start]])
        jmin = int(lo[order[start]])
        while stop < m:
            cand_max = max(jmax, int(hi[order[stop]]))
            cand_min = min(jmin, int(lo[order[stop]]))
            if (stop - start + 1) * max(cand_max - cand_min, 1) > _MAX_CELLS:
                break
            jmax, jmin = cand_max, cand_min
            stop += 1
        idx = order[start:stop]
        if jmax > jmin:
            ln = logn[jmin:jmax]
            mag = np.exp(-np.outer(sig[idx], ln)) * a[jmin:jmax]
            ph = np.outer(tabs[idx], ln)
            terms = mag * np.exp(-1j * ph)
            amag = np.abs(mag)
            for r, i in enumerate(idx):
                l0 = int(lo[i]) - jmin
                h0 = int(hi[i]) - jmin
                if h0 > l0:
                    vals[i] = terms[r, l0:h0].sum()
                    abss[i] = amag[r, l0:h0].sum()
        start = stop
    vals = np.where(flip, np.conj(vals), vals)
    return vals, abss


def _rounding(t_abs, n_max, abs_sum):
    """Worst-case rounding of a dense sum whose phases are ``t log n``."""
    return EPS * (8.0 + 2.0 * t_abs * math.log(max(n_max, 2.0))) * abs_sum


def partial_sum(seq: TermSequence, N: float, s):
    """``f_N(s) = sum_{n_j <= N} a_j n_j^-s`` summed in increasing ``n_j``."""
    if N < 0:
        raise ValueError("partial_sum needs N >= 0")
    n, a = seq.terms(N)
    scalar = np.ndim(s) == 0
    vals, _ = dirichlet_sum(n, a, s)
    return complex(vals[0]) if scalar else vals.reshape(np.shape(s))


# --------------------------------------------------------------------------
# tail continuation
# --------------------------------------------------------------------------

def main_term_tail(seq: TermSequence, X, s):
    """``int_X^inf Q(log x) x^-s dx`` continued to ``s != 1``.

    With ``u = log x`` this is ``X^(1-s) sum_m Q^(m)(log X) / (s-1)^(m+1)``
    (repeated integration by parts, exact for polynomial ``Q``).
    """
    s = np.asarray(s, dtype=complex)
    X = np.asarray(X, dtype=float)
    lX = np.log(X)
    Q = seq.density_poly()
    z = s - 1.0
    acc = np.zeros(np.broadcast(s, X).shape, dtype=complex)
    zp = z.copy()
    deriv = Q
    for _ in range(Q.size):
        acc = acc + np.polynomial.polynomial.polyval(lX, deriv) / zp
        deriv = np.polynomial.polynomial.polyder(deriv) if deriv.size > 1 else np.zeros(1)
        zp = zp * z
        if not np.any(deriv):
            break
    return np.exp((1.0 - s) * lX) * acc


def truncation_bound(seq: TermSequence, X, s):
    """Bound on ``|s int_X^inf R(x) x^(-s-1) dx|`` from ``|R(x)| <= C_A x^beta log(x+2)^q``."""
    s = np.asarray(s, dtype=complex)
    X = np.asarray(X, dtype=float)
    c = s.real - seq.beta
    CA = seq.C_A if np.isfinite(seq.C_A) else 1.0
    if seq.q <= 0:
        integral = np.log(X + 2.0) ** seq.q * X ** (-c) / c
    else:
        # log(x+2) <= log(x) + 1 for x >= 2; u = log x substitution
        L = np.log(np.maximum(X, 2.0)) + 1.0
        integral = math.exp(0.0) * np.exp(c) * _gamma(seq.q + 1) * gammaincc(seq.q + 1, c * L) / c ** (seq.q + 1)
    return np.abs(s) * CA * integral


def _check_domain(seq: TermSequence, s, margin: float):
    s = np.asarray(s, dtype=complex)
    if np.any(s.real <= seq.beta + margin):
        raise ContinuationDomainError(
            f"continuation domain: need sigma > beta + margin = {seq.beta + margin:g}")
    if seq.pole_order and np.any(s == 1.0):
        raise PoleError("pole: f has a pole at s = 1")


def _choose_X(seq: TermSequence, N, s, tol, max_terms):
    """Smallest ``X >= N`` (per ``s``) with truncation bound below ``tol / 2``."""
    N = np.asarray(N, dtype=float)
    lo = np.log(np.maximum(N, 2.0))
    hi = lo + 1.0
    # expand until the bound is met (or the range/budget is hit)
    cap = math.log(min(seq.x_limit, 1e300))
    for _ in range(200):
        ok = truncation_bound(seq, np.exp(hi), s) <= tol / 2
        if np.all(ok | (hi >= cap)):
            break
        hi = np.where(ok, hi, np.minimum(hi + (hi - lo) + 1.0, cap))
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ok = truncation_bound(seq, np.exp(mid), s) <= tol / 2
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    X = np.maximum(np.exp(hi), N)
    X = np.minimum(X, seq.x_limit)
    # term budget: cap X at the n of the max_terms-th term
    nb, _ = seq.terms(float(np.max(X)))
    if nb.size > max_terms:
        X = np.minimum(X, nb[max_terms - 1])
    return np.maximum(X, N)


def tail_continuation(seq: TermSequence, N, s, tol: float = 1e-10,
                      margin: float = DEFAULT_MARGIN, max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    """Continuation of ``f(s) - f_N(s)`` into ``sigma > beta``.

    Lattice-type models use their closed-form ``tail_sum``. Otherwise the
    identity is applied at a larger cutoff ``X`` (terms in ``(N, X]`` summed
    exactly, which integrates ``R`` segment by segment on ``[N, X]``) and
    the remaining ``s int_X^inf R x^(-s-1) dx`` is bounded by
    :func:`truncation_bound`.
    """
    scalar = np.ndim(s) == 0 and np.ndim(N) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    N_arr = np.broadcast_to(np.asarray(N, dtype=float), s_arr.shape).astype(float)
    _check_domain(seq, s_arr, margin)
    if seq.tail_sum is not None:
        val, err = seq.tail_sum(N_arr, s_arr)
        X = np.full(s_arr.shape, np.inf)
        method = "closed-form-tail"
    else:
        X = _choose_X(seq, N_arr, s_arr, tol, max_terms)
        n, a = seq.terms(float(np.max(X)))
        lo = np.searchsorted(n, N_arr, side="right")
        hi = np.searchsorted(n, X, side="right")
        mid, abss = dirichlet_sum(n, a, s_arr, lo, hi)
        A_X = np.array([math.fsum(a[:h].tolist()) for h in hi]) if n.size else np.zeros(s_arr.size)
        R_X = A_X - seq.main_term(X)
        boundary = R_X * np.exp(-s_arr * np.log(X))
        val = mid + main_term_tail(seq, X, s_arr) - boundary
        err = truncation_bound(seq, X, s_arr) + _rounding(np.abs(s_arr.imag), np.max(X), abss)
        method = "segment-integral"
    if scalar:
        return EvalResult(complex(val[0]), float(err[0]), float(N_arr[0]), float(X[0]), method)
    return EvalResult(val, err, N_arr, X, method)


def default_cutoff(seq: TermSequence, t) -> np.ndarray:
    """``N = max(2, (1 + |t|)^(1/(1-beta)))``, the balance point of the two error terms."""
    t = np.abs(np.asarray(t, dtype=float))
    return np.maximum(2.0, (1.0 + t) ** (1.0 / (1.0 - seq.beta)))


def evaluate(seq: TermSequence, s, tol: float = 1e-10, N=None,
             margin: float = DEFAULT_MARGIN, max_terms: int = DEFAULT_MAX_TERMS) -> EvalResult:
    """``f(s)`` for ``sigma > beta + margin`` as ``f_N(s)`` plus the continued tail."""
    scalar = np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    _check_domain(seq, s_arr, margin)
    if N is None:
        N_arr = default_cutoff(seq, s_arr.imag)
    else:
        N_arr = np.broadcast_to(np.asarray(N, dtype=float), s_arr.shape).astype(float)
    if seq.x_limit < math.inf:
        N_arr = np.minimum(N_arr, seq.x_limit)
    n, a = seq.terms(float(np.max(N_arr)))
    hi = np.searchsorted(n, N_arr, side="right")
    head, abss = dirichlet_sum(n, a, s_arr, None, hi)
    tail = tail_continuation(seq, N_arr, s_arr, tol, margin, max_terms)
    value = head + tail.value
    err = tail.err_bound + _rounding(np.abs(s_arr.imag), float(np.max(N_arr)), abss)
    if scalar:
        return EvalResult(complex(value[0]), float(err[0]), float(N_arr[0]),
                          float(np.atleast_1d(tail.X_max)[0]), tail.method)
    return EvalResult(value, err, N_arr, tail.X_max, tail.method)


def evaluator(seq: TermSequence, tol: float = 1e-10, **kw):
    """Vectorised ``s -> (value, err)`` closure over :func:`evaluate`."""
    def fn(s):
        r = evaluate(seq, np.asarray(s, dtype=complex), tol=tol, **kw)
        return r.value, r.err_bound
    fn.pole_order = seq.pole_order
    fn.beta = seq.beta
    return fn
