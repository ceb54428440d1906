"""Zero counting by the argument principle on rectangles."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import bisect_monotone
from .series import TermSequence, evaluate

MAX_POINTS_PER_EDGE = 1 << 20


@dataclass(frozen=True)
class Rectangle:
    sigma0: float
    sigma1: float
    T: float

    def __post_init__(self):
        if not self.sigma0 < self.sigma1:
            raise ValueError("need sigma0 < sigma1")
        if not self.T > 0:
            raise ValueError("need T > 0")

    def contains(self, s: complex) -> bool:
        return self.sigma0 < s.real < self.sigma1 and -self.T < s.imag < self.T

    def edges(self):
        """Counter-clockwise corner pairs."""
        a = complex(self.sigma0, -self.T)
        b = complex(self.sigma1, -self.T)
        c = complex(self.sigma1, self.T)
        d = complex(self.sigma0, self.T)
        return [(a, b), (b, c), (c, d), (d, a)]


@dataclass
class ZeroCountReport:
    count: int
    winding_raw: float
    pole_adjusted: bool
    min_boundary_modulus: float
    warnings: list = field(default_factory=list)
    rect: Rectangle | None = None
    points: int = 0


class ZeroNearBoundaryError(RuntimeError):
    pass


class WindingResolutionError(RuntimeError):
    pass


def as_function(evaluator, tol: float = 1e-10):
    """``s -> complex array`` plus pole order, for a model or a plain callable."""
    if isinstance(evaluator, TermSequence):
        seq = evaluator

        def fn(s):
            return np.asarray(evaluate(seq, np.asarray(s, dtype=complex), tol=tol).value)
        return fn, seq.pole_order, seq.beta

    def fn(s):
        out = evaluator(np.asarray(s, dtype=complex))
        if isinstance(out, tuple):
            out = out[0]
        return np.asarray(out, dtype=complex)
    return fn, int(getattr(evaluator, "pole_order", 0)), getattr(evaluator, "beta", -math.inf)


def _edge_winding(fn, z0: complex, z1: complex, m0: int):
    """Sum of principal ``Delta arg`` along ``z0 -> z1`` with adaptive midpoints."""
    u = np.linspace(0.0, 1.0, m0 + 1)
    f = fn(z0 + (z1 - z0) * u)
    while True:
        ratio = f[1:] / f[:-1]
        dphi = np.angle(ratio)
        rel = np.abs(f[1:] - f[:-1]) / np.abs(f[:-1])
        bad = (np.abs(dphi) >= math.pi / 2) | (rel >= 0.5)
        if not np.any(bad):
            return float(np.sum(dphi)) / (2 * math.pi), float(np.min(np.abs(f))), u.size, True
        if u.size + int(np.sum(bad)) > MAX_POINTS_PER_EDGE:
            return float(np.sum(dphi)) / (2 * math.pi), float(np.min(np.abs(f))), u.size, False
        idx = np.nonzero(bad)[0]
        mid = 0.5 * (u[idx] + u[idx + 1])
        fm = fn(z0 + (z1 - z0) * mid)
        u = np.insert(u, idx + 1, mid)
        f = np.insert(f, idx + 1, fm)


def count_zeros(evaluator, rect: Rectangle, step_tol: float = 1e-3, modulus_tol: float = 1e-8,
                tol: float = 1e-10, pole_order: int | None = None, max_retries: int = 3) -> ZeroCountReport:
    """Zeros of ``f`` in ``rect`` (with multiplicity) from the boundary winding number.

    A pole of order ``p`` at ``s = 1`` inside the rectangle contributes
    ``-p`` to the winding and is added back. If ``|f|`` on the boundary
    drops below ``modulus_tol`` times its median the top/bottom edges are
    moved out by ``step_tol`` and the count is retried.
    """
    fn, p_default, beta = as_function(evaluator, tol)
    p = p_default if pole_order is None else int(pole_order)
    if rect.sigma0 <= beta:
        raise ValueError("rectangle must lie to the right of sigma = beta")
    notes: list[str] = []
    for attempt in range(max_retries + 1):
        total = 0.0
        mins = []
        npts = 0
        resolved = True
        for z0, z1 in rect.edges():
            length = abs(z1 - z0)
            m0 = max(64, int(math.ceil(8 * length)))
            w, mn, k, ok = _edge_winding(fn, z0, z1, m0)
            total += w
            mins.append(mn)
            npts += k
            resolved &= ok
        min_mod = min(mins)
        scale = float(np.median(np.abs(fn(np.array([e[0] for e in rect.edges()])))))
        if min_mod < modulus_tol * max(scale, 1e-300) or not resolved:
            msg = (f"zero near boundary (min |f| = {min_mod:.3g}) at T = {rect.T:g}"
                   if resolved else f"edge resolution cap hit at T = {rect.T:g}")
            notes.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            if attempt < max_retries:
                rect = Rectangle(rect.sigma0, rect.sigma1, rect.T + step_tol)
                continue
            raise ZeroNearBoundaryError(msg + "; retries exhausted")
        break
    nearest = round(total)
    if abs(total - nearest) >= 0.25:
        raise WindingResolutionError(f"non-integral winding {total:.4f}: insufficient resolution")
    pole_inside = p > 0 and rect.contains(1.0 + 0j)
    count = int(nearest) + (p if pole_inside else 0)
    return ZeroCountReport(count, total, pole_inside, min_mod, notes, rect, npts)


def auto_sigma1(seq: TermSequence, tol: float = 1e-12, hi: float = 64.0) -> float:
    """Smallest ``sigma`` with ``a_1 n_1^-sigma > 2 sum_{j>=2} a_j n_j^-sigma`` (positive models).

    The rest of the series is ``f(sigma) - a_1 n_1^-sigma`` evaluated with
    its error bound added, so the inequality is certified up to the
    empirical constants of the model. The crossing is scaled up by 1%
    for margin.
    """
    if not seq.positive:
        raise ValueError("auto_sigma1 needs positive coefficients; pass sigma1 explicitly")
    n, a = seq.terms(max(2.0, 1.0))
    if n.size == 0:
        n, a = seq.terms(16.0)
    n1, a1 = float(n[0]), float(a[0])
    lo = seq.beta + 0.5 + 1e-3

    def excess(sig):
        sig = float(np.atleast_1d(sig)[0])
        if sig == 1.0:
            sig = 1.0 + 1e-9
        r = evaluate(seq, complex(sig, 0.0), tol=1e-12)
        first = a1 * math.exp(-sig * math.log(n1))
        rest = r.value.real - first + r.err_bound
        return np.array([2 * rest / first])

    # excess is decreasing in sigma; bisect on its negation
    if excess(hi)[0] >= 1.0:
        raise ValueError("auto_sigma1: first term never dominates on the search range")
    lo = max(lo, 1.0 + 1e-6) if seq.pole_order else lo
    if excess(lo)[0] < 1.0:
        return lo
    s1 = bisect_monotone(lambda x: -excess(x), -1.0, lo, hi, tol=tol)
    return float(s1) * 1.01


def zero_density_scan(evaluator, sigma: float, T_list, sigma1: float | None = None,
                      step_tol: float = 1e-3, tol: float = 1e-10) -> list[tuple[float, int, ZeroCountReport]]:
    """``N(sigma, T)`` for each ``T`` on rectangles ``[sigma, sigma1] x [-T, T]``."""
    if sigma1 is None:
        if not isinstance(evaluator, TermSequence):
            raise ValueError("sigma1 must be given for plain callables")
        sigma1 = auto_sigma1(evaluator)
    sigma1 = max(float(sigma1), sigma + 0.5)
    rows = []
    for T in sorted(float(t) for t in T_list):
        rep = count_zeros(evaluator, Rectangle(sigma, sigma1, T), step_tol=step_tol, tol=tol)
        rows.append((T, rep.count, rep))
    return rows
