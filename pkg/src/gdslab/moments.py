"""Second moments of Dirichlet series and polynomials.

Four routes to ``int |f(sigma+it)|^2 dt``: adaptive quadrature of the
evaluator, the exact sinc double sum for polynomials, the Fejer-smoothed
``sinc^2`` double sum (an upper bound), and the diagonal limit series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .numerics import QuadratureSpec, integrate_adaptive
from .series import EPS, TermSequence, default_cutoff, evaluate, sinc

_PAIR_BLOCK = 1 << 22
FEJER_C0 = 2.0   # (1/T) int_{-2T}^{2T} (1 - |t|/2T) e^{iut} dt = 2 sinc^2(T u)


class DivergentSeriesError(ValueError):
    pass


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    method: str
    sigma: float
    T_or_N: float
    err_est: float
    converged: bool = True


@dataclass(frozen=True)
class MVReport:
    lhs: float
    diagonal: float
    bound: float
    delta_min: float
    err_est: float

    @property
    def holds(self) -> bool:
        return abs(self.lhs - self.diagonal) <= self.bound + self.err_est

    @property
    def theta(self) -> float:
        return (self.lhs - self.diagonal) / self.bound if self.bound > 0 else 0.0


def _terms(seq, N):
    if isinstance(seq, TermSequence):
        return seq.terms(N)
    n, a = seq
    n = np.asarray(n, dtype=float)
    a = np.asarray(a, dtype=float)
    keep = n <= N
    return n[keep], a[keep]


# --------------------------------------------------------------------------
# limit series
# --------------------------------------------------------------------------

def _tail_bound(seq: TermSequence, sigma: float, X: float) -> float:
    """Empirical bound on ``sum_{n_j > X} a_j^2 n_j^-2sigma``.

    Uses ``a_j <= C n_j^beta L^q`` (``L = log(x+2)``) and Stieltjes integration
    against ``A = main + R`` with ``|R| <= C_A x^beta L^q``.
    """
    b, q = seq.beta, seq.q
    C, CA = seq.coeff_bound_C, seq.C_A
    e = b - 2 * sigma               # exponent of h(x) = x^e L^q
    Q = seq.density_poly()
    lX = math.log(X)

    def logL(lx):
        return math.log(lx + math.log1p(2.0 * math.exp(-lx)))

    # with x = X e^v every integrand is exp(polynomial-ish in v); work in logs
    def main_int(v):
        lx = lX + v
        p = abs(np.polynomial.polynomial.polyval(lx, Q))
        return math.exp((e + 1) * lx + q * logL(lx)) * p

    def rem_int(v):
        lx = lX + v
        Lx = math.exp(logL(lx))
        return CA * math.exp((e + b) * lx + 2 * q * logL(lx)) * (abs(e) + q / Lx)

    m1 = quad(main_int, 0, np.inf, limit=200)[0]
    m2 = quad(rem_int, 0, np.inf, limit=200)[0]
    boundary = CA * math.exp((e + b) * lX + 2 * q * logL(lX))
    return C * (m1 + m2 + boundary)


def limit_series(seq, sigma: float, tol: float = 1e-6, margin: float = 0.01,
                 max_terms: int = 20_000_000) -> MomentEstimate:
    """``sum_j a_j^2 n_j^-2sigma``: partial sum to ``X`` plus half the tail bound.

    Finite ``(n, a)`` polynomials are summed exactly. For models the
    reported value is ``partial + B/2`` with ``err_est = B/2``, ``B`` the
    empirical tail bound, since every omitted term is non-negative.
    """
    if not isinstance(seq, TermSequence):
        n, a = _terms(seq, math.inf)
        v = math.fsum((a * a * n ** (-2 * sigma)).tolist())
        return MomentEstimate(v, "limit-series", sigma, float(n.size), EPS * n.size * v)
    if 2 * sigma - seq.beta <= 1 + margin:
        raise DivergentSeriesError(
            f"divergent series: need 2 sigma - beta > 1 + {margin} (sigma = {sigma}, beta = {seq.beta})")
    X = 16.0
    cap = seq.x_limit
    while _tail_bound(seq, sigma, X) > tol and X < cap:
        X = min(X * 2.0, cap)
        if len(seq.terms(X)[0]) > max_terms:
            break
    n, a = seq.terms(X)
    part = math.fsum((a * a * np.exp(-2 * sigma * np.log(n))).tolist())
    B = _tail_bound(seq, sigma, X) if X < math.inf else 0.0
    return MomentEstimate(part + B / 2, "limit-series", sigma, X, B / 2 + EPS * n.size * part, B <= tol)


# --------------------------------------------------------------------------
# exact and Fejer double sums
# --------------------------------------------------------------------------

def _pair_sum(c, logn, T, kernel):
    """``sum_{j<k} c_j c_k kernel(T (log n_k - log n_j))`` in fixed row order."""
    J = c.size
    total = 0.0
    rows = max(1, _PAIR_BLOCK // max(J, 1))
    partials = []
    for j0 in range(0, J - 1, rows):
        j1 = min(J - 1, j0 + rows)
        jj = np.arange(j0, j1)
        d = logn[None, :] - logn[jj, None]
        mask = np.arange(J)[None, :] > jj[:, None]
        k = np.where(mask, kernel(T * np.where(mask, d, 0.0)), 0.0)
        partials.append(np.sum(c[jj, None] * c[None, :] * k, axis=1))
    if partials:
        total = math.fsum(np.concatenate(partials).tolist())
    return total


def polynomial_mean_square_exact(seq, N: float, sigma: float, T: float) -> MomentEstimate:
    """``(1/2T) int_{-T}^{T} |f_N(sigma+it)|^2 dt`` from the sinc identity."""
    if T <= 0:
        raise ValueError("T must be positive")
    n, a = _terms(seq, N)
    c = a * n ** (-sigma)
    logn = np.log(n)
    diag = math.fsum((c * c).tolist())
    off = _pair_sum(c, logn, T, sinc)
    s1 = float(np.sum(np.abs(c)))
    return MomentEstimate(diag + 2 * off, "exact-sinc", sigma, float(N), 4 * EPS * max(n.size, 1) * s1 * s1)


def fejer_mean_square(seq, N: float, sigma: float, T: float) -> MomentEstimate:
    """``K(T) = (1/T) int_{-2T}^{2T} (1 - |t|/2T)_+ |f_N|^2 dt = 2 sum_jk c_j c_k sinc^2(T log(n_k/n_j))``.

    Bounds ``(1/T) int_0^T |f_N|^2`` from above: the kernel is at least 1/2
    on ``[-T, T]`` and ``|f_N|^2`` is even in ``t`` for real coefficients.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    n, a = _terms(seq, N)
    c = a * n ** (-sigma)
    logn = np.log(n)
    diag = math.fsum((c * c).tolist())
    off = _pair_sum(c, logn, T, lambda x: sinc(x) ** 2)
    s1 = float(np.sum(np.abs(c)))
    return MomentEstimate(FEJER_C0 * (diag + 2 * off), "fejer", sigma, float(N),
                          8 * EPS * max(n.size, 1) * s1 * s1)


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

def polynomial_evaluator(n, a):
    """Exact evaluator for a finite Dirichlet polynomial (no truncation error)."""
    n = np.asarray(n, dtype=float)
    a = np.asarray(a, dtype=float)
    logn = np.log(n)

    def fn(s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty(s.size, dtype=complex)
        step = max(1, (1 << 20) // max(n.size, 1))
        for i in range(0, s.size, step):
            out[i:i + step] = (np.exp(-np.outer(s[i:i + step], logn)) * a).sum(axis=1)
        s1 = np.exp(-np.outer(s.real, logn)) @ np.abs(a)
        return out, EPS * (8 + 2 * np.abs(s.imag) * max(logn.max(initial=0), 1)) * s1
    fn.pole_order = 0
    fn.hint = float(max(logn.max(initial=0.0) - logn.min(initial=0.0), 0.0))
    return fn


def _as_evaluator(obj, tol, T1):
    if isinstance(obj, TermSequence):
        seq = obj

        def fn(s):
            r = evaluate(seq, s, tol=tol)
            return r.value, r.err_bound
        fn.pole_order = seq.pole_order
        fn.hint = float(math.log(max(float(default_cutoff(seq, T1)), 2.0)))
        return fn
    if isinstance(obj, tuple) and len(obj) == 2:
        return polynomial_evaluator(*obj)
    return obj


def mean_square_quadrature(evaluator, sigma: float, T0: float, T1: float,
                           spec: QuadratureSpec | None = None, tol: float = 1e-9) -> MomentEstimate:
    """Raw ``int_{T0}^{T1} |f(sigma+it)|^2 dt`` (the caller normalises).

    ``evaluator`` is a :class:`TermSequence`, an ``(n, a)`` polynomial, or a
    callable ``s -> (value, err)``. ``err_est`` adds the quadrature estimate
    and ``(T1-T0) * max(2|f| err + err^2)`` over all sampled nodes.
    """
    fn = _as_evaluator(evaluator, tol, T1)
    if T1 < T0:
        raise ValueError("need T0 <= T1")
    if sigma == 1.0 and getattr(fn, "pole_order", 0) and T0 < 1.0:
        raise ValueError("pole: start at T0 >= 1 when sigma = 1")
    if spec is None:
        spec = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12, oscillation_hint=getattr(fn, "hint", 0.0))
    worst = [0.0]

    def integrand(t):
        v, e = fn(sigma + 1j * np.asarray(t))
        v = np.asarray(v)
        e = np.asarray(e, dtype=float)
        absf = np.abs(v)
        worst[0] = max(worst[0], float(np.max(2 * absf * e + e * e, initial=0.0)))
        return absf * absf

    res = integrate_adaptive(integrand, T0, T1, spec)
    err = res.err_est + (T1 - T0) * worst[0]
    return MomentEstimate(float(res.value), "quadrature", sigma, float(T1), err, res.converged)


def moment_scan(evaluator, sigma: float, T_list, T0: float = 0.0,
                spec: QuadratureSpec | None = None, tol: float = 1e-9) -> list[MomentEstimate]:
    """``(1/T) int_{T0}^{T} |f|^2`` for increasing ``T``, integrating consecutive intervals once."""
    Ts = [float(t) for t in T_list]
    if any(b <= a for a, b in zip(Ts, Ts[1:])) or Ts[0] <= T0:
        raise ValueError("T_list must be increasing and above T0")
    fn = _as_evaluator(evaluator, tol, Ts[-1])
    out = []
    acc = 0.0
    acc_err = 0.0
    conv = True
    left = T0
    for T in Ts:
        r = mean_square_quadrature(fn, sigma, left, T, spec, tol)
        acc += r.value
        acc_err += r.err_est
        conv &= r.converged
        out.append(MomentEstimate(acc / T, "quadrature", sigma, T, acc_err / T, conv))
        left = T
    return out


# --------------------------------------------------------------------------
# Montgomery-Vaughan and growth fits
# --------------------------------------------------------------------------

def mv_check(lambdas, coeffs, T: float, spec: QuadratureSpec | None = None) -> MVReport:
    """``int_0^T |sum a_j e^{i lambda_j t}|^2 dt`` against ``T sum|a|^2 +- 3 pi sum |a_j|^2 / delta_j``."""
    lam = np.asarray(lambdas, dtype=float)
    a = np.asarray(coeffs, dtype=complex)
    if lam.shape != a.shape or lam.ndim != 1 or lam.size == 0:
        raise ValueError("lambdas and coeffs must be equal-length 1-d sequences")
    order = np.argsort(lam)
    gaps = np.diff(lam[order])
    if np.any(gaps <= 0):
        raise ValueError("duplicate frequencies: delta_j = 0")
    delta = np.full(lam.size, np.inf)
    if lam.size > 1:
        d_sorted = np.minimum(np.concatenate([[np.inf], gaps]), np.concatenate([gaps, [np.inf]]))
        delta[order] = d_sorted
    a2 = np.abs(a) ** 2
    spread = float(lam.max() - lam.min())
    if spec is None:
        spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-12, oscillation_hint=spread)

    def integrand(t):
        ph = np.exp(1j * np.outer(t, lam))
        return np.abs(ph @ a) ** 2

    res = integrate_adaptive(integrand, 0.0, T, spec)
    diag = T * float(np.sum(a2))
    bound = 3 * math.pi * float(np.sum(a2 / delta)) if lam.size > 1 else 0.0
    return MVReport(float(res.value), diag, bound, float(delta.min()), res.err_est + 8 * EPS * diag)


def growth_fit(points) -> tuple[float, float, float]:
    """Least-squares line through ``(log T, log value)``: ``(slope, intercept, rms residual)``."""
    pts = [(float(t), float(v)) for t, v in points]
    if len(pts) < 3:
        raise ValueError("growth_fit needs at least 3 points")
    if any(t <= 0 or v <= 0 for t, v in pts):
        raise ValueError("growth_fit needs positive T and values")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    if np.ptp(x) == 0:
        raise ValueError("growth_fit: degenerate T values")
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), resid
