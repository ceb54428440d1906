"""Concrete sequences: power laws, zeta derivatives, r(n), the alternating
counterexample, the eta-modulated and clustered sequences, and seeded random
discretisations of a continuous counting model."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numerics import bisect_monotone
from .series import EPS, TermSequence, dirichlet_sum
from .zeta import dirichlet_beta, power_tail, riemann_zeta

DEFAULT_JMAX = 10**7


def _count_powers(x, exponent: float, jmax: int):
    """Number of ``j in [1, jmax]`` with ``j**exponent <= x`` (exact after a fix-up)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        J = np.floor(np.where(x > 0, x, 0.0) ** (1.0 / exponent)).astype(np.int64)
    J = np.minimum(J, jmax)
    # guard against pow rounding on exact powers
    J = np.where((J + 1 <= jmax) & ((J + 1.0) ** exponent <= x), J + 1, J)
    J = np.where((J >= 1) & (J.astype(float) ** exponent > x), J - 1, J)
    return np.maximum(J, 0)


def _safe_index(w, J):
    """Smallest index at or above ``J`` where the Euler-Maclaurin tail is accurate."""
    need = 16 + np.ceil(np.abs(w) / math.pi)
    return np.maximum(np.asarray(J, dtype=float), need).astype(np.int64)


def zeta_tail(w, J):
    """``sum_{j > J} j^-w`` (continued), per element; returns ``(value, err)``.

    Terms between ``J`` and a safe Euler-Maclaurin start are summed directly.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    J = np.broadcast_to(np.asarray(J, dtype=np.int64), w.shape)
    Je = _safe_index(w, J)
    top = int(np.max(Je))
    j = np.arange(1, top + 1, dtype=float)
    mid, abss = dirichlet_sum(j, np.ones_like(j), w, J, Je)
    tail, err = power_tail(w, Je)
    err = err + EPS * (8.0 + 2.0 * np.abs(w.imag) * math.log(max(top, 2))) * abss
    return mid + tail, err


def power_law(alpha: float, jmax: int = DEFAULT_JMAX, name: str | None = None) -> TermSequence:
    """``n_j = j^(1/(1-alpha))``, ``a_j = n_j^alpha``; ``f(s) = zeta((s-alpha)/(1-alpha))``."""
    alpha = float(alpha)
    if not alpha < 1:
        raise ValueError("power_law needs alpha < 1")
    jmax = int(jmax)
    e = 1.0 / (1.0 - alpha)

    def enum(x):
        J = int(_count_powers(x, e, jmax))
        j = np.arange(1, J + 1, dtype=float)
        return j ** e, j ** (alpha * e)

    def to_w(s):
        return (np.asarray(s, dtype=complex) - alpha) * e

    def tail_sum(N, s):
        return zeta_tail(to_w(s), _count_powers(N, e, jmax))

    def closed_form(s):
        return riemann_zeta(to_w(s))

    return TermSequence(
        name=name or ("integers" if alpha == 0 else f"power_law({alpha:g})"),
        enumerate_up_to=enum,
        rho=1.0 - alpha,
        beta=max(alpha, 0.0),
        x_limit=float(jmax) ** e,
        tail_sum=tail_sum,
        closed_form=closed_form,
        params={"kind": "power_law", "alpha": alpha, "jmax": jmax},
    )


def integers(jmax: int = DEFAULT_JMAX) -> TermSequence:
    """``n_j = j``, ``a_j = 1``: the Riemann zeta function."""
    seq = power_law(0.0, jmax, name="integers")
    seq.params["kind"] = "integers"
    return seq


def log_power_poly(k: int) -> tuple[float, ...]:
    """``P_k`` with ``int_1^x (log u)^k du = x P_k(log x) + const``: ``c_i = (-1)^(k-i) k!/i!``."""
    return tuple((-1) ** (k - i) * math.factorial(k) / math.factorial(i) for i in range(k + 1))


def zeta_derivative(k: int, jmax: int = DEFAULT_JMAX) -> TermSequence:
    """``n_j = j``, ``a_j = (log j)^k``; ``f = (-1)^k zeta^(k)``. The zero term ``j = 1`` is dropped for ``k >= 1``."""
    k = int(k)
    if k < 0:
        raise ValueError("zeta_derivative needs k >= 0")
    if k == 0:
        seq = integers(jmax)
        return seq
    jmax = int(jmax)

    def enum(x):
        J = min(int(math.floor(x)), jmax) if x >= 1 else 0
        j = np.arange(2, J + 1, dtype=float)
        return j, np.log(j) ** k

    return TermSequence(
        name=f"zeta_derivative({k})",
        enumerate_up_to=enum,
        rho=1.0,
        beta=0.0,
        main_term_poly=log_power_poly(k),
        q=float(k),
        x_limit=float(jmax),
        params={"kind": "zeta_derivative", "k": k, "jmax": jmax},
    )


@lru_cache(maxsize=8)
def _r_table(xmax: int) -> np.ndarray:
    m = math.isqrt(xmax)
    u = np.arange(-m, m + 1, dtype=np.int64)
    sq = (u * u)[:, None] + (u * u)[None, :]
    return np.bincount(sq[sq <= xmax].ravel(), minlength=xmax + 1)


def r2(n_max: int) -> np.ndarray:
    """``r(n)`` for ``0 <= n <= n_max``: ordered signed representations as ``u^2 + v^2``."""
    return _r_table(int(n_max)).copy()


def sum_two_squares(xmax: float = 10**6) -> TermSequence:
    """``a = r(n)`` on the integers with ``r(n) > 0``; ``f(s) = 4 zeta(s) L(s, chi_4)``."""
    xmax = int(xmax)
    if xmax < 1:
        raise ValueError("sum_two_squares needs xmax >= 1")
    table = _r_table(xmax)
    n_all = np.nonzero(table[1:])[0] + 1

    def enum(x):
        k = np.searchsorted(n_all, x, side="right")
        n = n_all[:k]
        return n.astype(float), table[n].astype(float)

    def closed_form(s):
        z, ez = riemann_zeta(s)
        L, eL = dirichlet_beta(s)
        return 4 * z * L, 4 * (np.abs(z) * eL + np.abs(L) * ez + ez * eL)

    return TermSequence(
        name="sum_two_squares",
        enumerate_up_to=enum,
        rho=math.pi,
        beta=0.5,
        x_limit=float(xmax),
        closed_form=closed_form,
        params={"kind": "sum_two_squares", "xmax": xmax},
    )


def alternating_beta(beta: float, jmax: int = DEFAULT_JMAX) -> TermSequence:
    """``n_j = j``, ``a_j = 1 + (-1)^j j^beta``. Coefficients are not all positive.

    ``f(s) = zeta(s) + (2^(1+beta-s) - 1) zeta(s - beta)``.
    """
    beta = float(beta)
    if not 0 < beta < 1:
        raise ValueError("alternating_beta needs 0 < beta < 1")
    jmax = int(jmax)

    def enum(x):
        J = min(int(math.floor(x)), jmax) if x >= 1 else 0
        j = np.arange(1, J + 1, dtype=float)
        sign = np.where(np.arange(1, J + 1) % 2 == 0, 1.0, -1.0)
        return j, 1.0 + sign * j ** beta

    def tail_sum(N, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        J = np.minimum(np.floor(np.asarray(N, dtype=float)), jmax).astype(np.int64)
        J = np.broadcast_to(J, s.shape)
        u = s - beta
        t1, e1 = zeta_tail(s, J)
        tu, eu = zeta_tail(u, J)
        th, eh = zeta_tail(u, J // 2)
        f2 = np.exp(-u * math.log(2.0))
        return t1 + 2 * f2 * th - tu, e1 + 2 * np.abs(f2) * eh + eu

    def closed_form(s):
        s = np.asarray(s, dtype=complex)
        z1, e1 = riemann_zeta(s)
        z2, e2 = riemann_zeta(s - beta)
        c = np.exp((1 + beta - s) * math.log(2.0)) - 1
        return z1 + c * z2, e1 + np.abs(c) * e2

    return TermSequence(
        name=f"alternating_beta({beta:g})",
        enumerate_up_to=enum,
        rho=1.0,
        beta=beta,
        x_limit=float(jmax),
        tail_sum=tail_sum,
        closed_form=closed_form,
        positive=False,
        params={"kind": "alternating_beta", "beta": beta, "jmax": jmax},
    )


# --------------------------------------------------------------------------
# eta-modulated sequence
# --------------------------------------------------------------------------

def eta_thresholds(jmax: int) -> list[int]:
    """``M_n = 2^(2^n)`` for all ``n`` with ``M_n <= 2 * jmax`` (plus one more)."""
    out = []
    n = 0
    while True:
        M = 2 ** (2 ** n)
        out.append(M)
        if M > jmax:
            return out
        n += 1


@dataclass(frozen=True)
class EtaSequence:
    jmax: int
    values: np.ndarray = field(repr=False)      # values[j] = eta_j for 0 <= j <= jmax
    thresholds: tuple[int, ...]

    def __getitem__(self, j: int) -> int:
        return int(self.values[j])

    def prefix_sums(self) -> np.ndarray:
        return np.cumsum(self.values)


def eta_sequence(jmax: int) -> EtaSequence:
    """``eta_j = (-1)^j`` on ``[M_2N, M_2N+1)``, ``0`` on ``[M_2N+1, M_2N+2)`` and for ``j < 2``."""
    jmax = int(jmax)
    if jmax < 2:
        raise ValueError("eta_sequence needs jmax >= 2")
    M = eta_thresholds(jmax)
    vals = np.zeros(jmax + 1, dtype=np.int8)
    j = np.arange(jmax + 1)
    for n in range(0, len(M) - 1, 2):
        lo, hi = M[n], min(M[n + 1], jmax + 1)
        if lo > jmax:
            break
        vals[lo:hi] = np.where(j[lo:hi] % 2 == 0, 1, -1)
    return EtaSequence(jmax, vals, tuple(M))


def eta_modulated(beta: float, jmax: int = 2**20) -> TermSequence:
    """``n_j = j^(1/(1-beta))``, ``a_j = n_j^beta (1 + eta_j)`` with zero terms dropped."""
    beta = float(beta)
    if not 0 <= beta < 1:
        raise ValueError("eta_modulated needs 0 <= beta < 1")
    jmax = int(jmax)
    eta = eta_sequence(jmax)
    e = 1.0 / (1.0 - beta)
    j = np.arange(1, jmax + 1)
    w = 1.0 + eta.values[1:].astype(float)
    keep = w > 0
    jj = j[keep].astype(float)
    n_all = jj ** e
    a_all = jj ** (beta * e) * w[keep]

    def enum(x):
        k = np.searchsorted(n_all, x, side="right")
        return n_all[:k], a_all[:k]

    seq = TermSequence(
        name=f"eta_modulated({beta:g})",
        enumerate_up_to=enum,
        rho=1.0 - beta,
        beta=beta,
        x_limit=float(jmax) ** e,
        params={"kind": "eta_modulated", "beta": beta, "jmax": jmax},
    )
    return seq


def eta_weighted_sum(T: int) -> float:
    """``sum_{j <= T} a_j^2 / j`` for the ``beta = 0`` eta-modulated sequence."""
    eta = eta_sequence(max(int(T), 2))
    j = np.arange(1, int(T) + 1, dtype=float)
    a = 1.0 + eta.values[1:int(T) + 1]
    return math.fsum((a * a / j).tolist())


# --------------------------------------------------------------------------
# clustered grid
# --------------------------------------------------------------------------

def clustered_k0(L: int, delta: float) -> int:
    return math.ceil(L ** (1.0 / delta)) + 1


def clustered_sequence(L: int, delta: float, kmax: int) -> TermSequence:
    """Clusters ``m_(k,l) = k + l k^(-delta)``, ``k0 <= k <= kmax``, ``0 <= l < L``, unit weights."""
    L = int(L)
    delta = float(delta)
    if L < 2 or delta <= 0:
        raise ValueError("clustered_sequence needs L >= 2 and delta > 0")
    k0 = clustered_k0(L, delta)
    if kmax <= k0:
        raise ValueError(f"clustered_sequence needs kmax > k0 = {k0}")
    k = np.arange(k0, int(kmax) + 1, dtype=float)
    l = np.arange(L, dtype=float)
    n_all = (k[:, None] + l[None, :] * k[:, None] ** (-delta)).ravel()
    if not np.all(np.diff(n_all) > 0):
        raise ValueError("clustered_sequence: clusters overlap")

    def enum(x):
        c = np.searchsorted(n_all, x, side="right")
        return n_all[:c], np.ones(c)

    return TermSequence(
        name=f"clustered({L},{delta:g})",
        enumerate_up_to=enum,
        rho=float(L),
        beta=0.0,
        x_limit=float(kmax),
        params={"kind": "clustered", "L": L, "delta": delta, "kmax": int(kmax), "k0": k0},
    )


# --------------------------------------------------------------------------
# random discretisation of a continuous counting model
# --------------------------------------------------------------------------

def uniform_stream(seed: int, idx: np.ndarray) -> np.ndarray:
    """Counter-based uniforms in ``(0, 1]``: 53 bits of blake2b(seed, j)."""
    out = np.empty(len(idx))
    key = int(seed).to_bytes(8, "little", signed=False)
    for i, j in enumerate(np.asarray(idx, dtype=np.int64)):
        h = hashlib.blake2b(int(j).to_bytes(8, "little", signed=True), digest_size=8, key=key).digest()
        out[i] = ((int.from_bytes(h, "little") >> 11) + 1) / 2.0 ** 53
    return out


def _bracket_hi(M, jmax, x_hi):
    if M(np.array([x_hi]))[0] < jmax:
        raise ValueError(f"random_discretize: M does not reach {jmax} on [1, {x_hi:g}]")
    return x_hi


def random_discretize(M, jmax: int, seed: int, x_hi: float, rho: float = 1.0, beta: float = 0.0,
                      name: str = "random_discretize") -> TermSequence:
    """One point per unit of mass of ``M``: ``n_j = inf{x : M(x) >= j - 1 + U_j}``.

    ``M`` is vectorised, continuous, non-decreasing with ``M(1) = 0``; ``x_hi``
    bounds the search. The strata are ``(x_(j-1), x_j]`` with ``M(x_j) = j``.
    """
    jmax = int(jmax)
    x_hi = _bracket_hi(M, jmax, float(x_hi))
    j = np.arange(1, jmax + 1)
    U = uniform_stream(seed, j)
    targets = (j - 1) + U
    n = bisect_monotone(lambda x: M(x), targets, 1.0, x_hi, tol=1e-12 * x_hi)
    strata = bisect_monotone(lambda x: M(x), j.astype(float), 1.0, x_hi, tol=1e-12 * x_hi)
    n = np.asarray(n, dtype=float)
    if not np.all(np.diff(n) > 0):
        raise ValueError("random_discretize: samples not strictly increasing (M has flat pieces)")

    def enum(x):
        c = np.searchsorted(n, x, side="right")
        return n[:c], np.ones(c)

    return TermSequence(
        name=name,
        enumerate_up_to=enum,
        rho=rho,
        beta=beta,
        main_term_poly=(rho,),
        x_limit=float(strata[-1]),
        params={"kind": "random_discretize", "seed": int(seed), "jmax": jmax,
                "strata": strata, "uniforms": U},
    )


def discrepancy_ratio(seq: TermSequence, M, I_t, x: float, t: float) -> tuple[float, float]:
    """``|S_t(x) - I_t(x)|`` and its ratio to ``sqrt(M(x)) (sqrt(log(x+1)) + sqrt(log(|t|+1)))``.

    ``S_t(x) = sum_{n_j <= x} n_j^(-it)`` and ``I_t(x) = int_1^x u^(-it) dM(u)`` (``I_t`` supplied).
    """
    n, _ = seq.terms(x)
    S = np.sum(np.exp(-1j * t * np.log(n)))
    diff = abs(S - I_t(x, t))
    Mx = float(M(np.array([x]))[0])
    scale = math.sqrt(Mx) * (math.sqrt(math.log(x + 1)) + math.sqrt(math.log(abs(t) + 1)))
    return diff, diff / scale


def linear_mass(x):
    """``M(x) = x - 1`` on ``x >= 1``."""
    return np.maximum(np.asarray(x, dtype=float) - 1.0, 0.0)


def linear_mass_transform(x: float, t: float) -> complex:
    """``int_1^x u^(-it) du``."""
    z = 1 - 1j * t
    return complex((np.exp(z * math.log(x)) - 1) / z)
