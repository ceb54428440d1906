"""Adaptive Gauss-Kronrod quadrature and bracketing root finders.

All integrands are vectorised: ``fn(x)`` receives a 1-d float array and
returns an array of the same length (real or complex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15), nodes on [0, 1] half.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full symmetric node set on [-1, 1]: -x0..-x6, 0, x6..x0
NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes x1, x3, x5 and the centre.
for _i, _w in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS[_i] = _w
    GAUSS_WEIGHTS[14 - _i] = _w
GAUSS_WEIGHTS[7] = _WG[3]

_MAX_POINTS_PER_CALL = 1 << 18


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_depth: int = 40
    oscillation_hint: float = 0.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.oscillation_hint < 0:
            raise ValueError("oscillation_hint must be non-negative")


@dataclass
class QuadResult:
    value: complex | float
    err_est: float
    panels_used: int
    converged: bool = True
    panels: np.ndarray = field(default_factory=lambda: np.empty((0, 2)), repr=False)


def panel_nodes(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Kronrod nodes for each panel, shape ``(len(left), 15)``."""
    centre = 0.5 * (left + right)
    half = 0.5 * (right - left)
    return centre[:, None] + half[:, None] * NODES[None, :]


def _apply_rule(fn, left, right):
    x = panel_nodes(left, right)
    flat = x.ravel()
    if flat.size <= _MAX_POINTS_PER_CALL:
        y = np.asarray(fn(flat))
    else:
        parts = [np.asarray(fn(flat[i:i + _MAX_POINTS_PER_CALL]))
                 for i in range(0, flat.size, _MAX_POINTS_PER_CALL)]
        y = np.concatenate(parts)
    y = y.reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise FloatingPointError("integrand returned non-finite values")
    half = 0.5 * (right - left)
    kron = half * (y @ KRONROD_WEIGHTS)
    gauss = half * (y @ GAUSS_WEIGHTS)
    return kron, np.abs(kron - gauss)


def integrate_adaptive(fn, a: float, b: float, spec: QuadratureSpec | None = None) -> QuadResult:
    """Globally adaptive G7/K15 quadrature of ``fn`` over ``[a, b]``.

    Panels start no wider than ``pi / oscillation_hint`` and are bisected
    while the summed |K15 - G7| estimate exceeds ``max(abs_tol,
    rel_tol * |I|)``. Panels that hit ``max_depth`` are kept with their
    honest error estimate and the result is flagged non-converged.
    """
    spec = spec or QuadratureSpec()
    a = float(a)
    b = float(b)
    if not b >= a:
        raise ValueError("integration bounds must satisfy a <= b")
    if a == b:
        return QuadResult(0.0, 0.0, 0, True, np.empty((0, 2)))

    n0 = 1
    if spec.oscillation_hint > 0:
        n0 = max(1, math.ceil((b - a) * spec.oscillation_hint / math.pi))
    edges = np.linspace(a, b, n0 + 1)
    left, right = edges[:-1], edges[1:]
    depth = np.zeros(n0, dtype=int)

    done_l, done_r, done_v, done_e = [], [], [], []
    converged = True
    while left.size:
        vals, errs = _apply_rule(fn, left, right)
        total = sum(np.sum(v) for v in done_v) + np.sum(vals)
        total_err = sum(float(np.sum(e)) for e in done_e) + float(np.sum(errs))
        target = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= target:
            done_l.append(left); done_r.append(right)
            done_v.append(vals); done_e.append(errs)
            break
        # local share of the error budget proportional to panel width
        share = target * (right - left) / (b - a)
        refine = errs > share
        stuck = refine & (depth >= spec.max_depth)
        if np.any(stuck):
            converged = False
        refine &= ~stuck
        keep = ~refine
        done_l.append(left[keep]); done_r.append(right[keep])
        done_v.append(vals[keep]); done_e.append(errs[keep])
        if not np.any(refine):
            break
        mid = 0.5 * (left[refine] + right[refine])
        new_depth = depth[refine] + 1
        left = np.concatenate([left[refine], mid])
        right = np.concatenate([mid, right[refine]])
        depth = np.concatenate([new_depth, new_depth])

    L = np.concatenate(done_l)
    R = np.concatenate(done_r)
    V = np.concatenate(done_v)
    E = np.concatenate(done_e)
    order = np.argsort(L, kind="stable")
    value = np.sum(V[order])
    err = float(np.sum(E[order]))
    if np.iscomplexobj(value):
        value = complex(value)
    else:
        value = float(value)
    if err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        converged = False
    return QuadResult(value, err, int(L.size), converged, np.column_stack([L[order], R[order]]))


def integrate_on_panels(fn, panels: np.ndarray):
    """Apply the Kronrod rule on a fixed panel set (no adaptivity)."""
    if panels.size == 0:
        return 0.0, 0.0
    vals, errs = _apply_rule(fn, panels[:, 0], panels[:, 1])
    return np.sum(vals), float(np.sum(errs))


def bisect_monotone(fn, target, lo, hi, tol: float = 1e-12, max_iter: int = 200):
    """Smallest-``x`` bracket search for ``fn(x) = target`` with ``fn`` non-decreasing.

    Works elementwise when ``target``/``lo``/``hi`` are arrays (``fn`` must then be
    vectorised). Returns the upper end of a bracket of width at most ``tol``
    (or at float resolution) on which ``fn`` crosses ``target``.
    """
    scalar = np.ndim(target) == 0 and np.ndim(lo) == 0 and np.ndim(hi) == 0
    target = np.atleast_1d(np.asarray(target, dtype=float))
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    f_lo = np.asarray(fn(lo if not scalar else lo[0]), dtype=float).reshape(-1)
    f_hi = np.asarray(fn(hi if not scalar else hi[0]), dtype=float).reshape(-1)
    if np.any(lo > hi) or np.any(f_lo > target) or np.any(f_hi < target):
        raise ValueError("bracket violation: need fn(lo) <= target <= fn(hi) and lo <= hi")
    exact = f_lo == target
    hi = np.where(exact, lo, hi)
    for _ in range(max_iter):
        width = hi - lo
        active = width > tol
        if not np.any(active):
            break
        mid = lo + 0.5 * width
        stalled = (mid <= lo) | (mid >= hi)
        active &= ~stalled
        if not np.any(active):
            break
        f_mid = np.asarray(fn(mid if not scalar else mid[0]), dtype=float).reshape(-1)
        below = f_mid < target
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
    return float(hi[0]) if scalar else hi


def bisect_root(fn, lo: float, hi: float, tol: float = 1e-13, max_iter: int = 300) -> float:
    """Sign-change bisection for a continuous scalar ``fn`` on ``[lo, hi]``."""
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError("bracket violation: fn(lo) and fn(hi) have the same sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        f_mid = fn(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
