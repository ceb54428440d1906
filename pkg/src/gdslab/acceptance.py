"""Desk-scale acceptance checks, shared by ``gdslab verify`` and the test suite.

Each check returns a :class:`Criterion` record; none of them raise on a
failed comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import bohr, models, moments, zeros
from .numerics import QuadratureSpec, integrate_adaptive

ZETA_1_5 = 2.612375348685488


@dataclass
class Criterion:
    id: int
    name: str
    passed: bool
    measured: float
    target: str
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.id:>2} {self.name}: measured={self.measured:.6g} target={self.target} ({self.seconds:.1f}s)"


@lru_cache(maxsize=None)
def zeta_moment(sigma: float, T: float) -> moments.MomentEstimate:
    return moments.mean_square_quadrature(models.integers(), sigma, 0.0, T)


def random_polynomial(rng: np.random.Generator, max_terms: int = 50):
    J = int(rng.integers(1, max_terms + 1))
    n = np.sort(rng.choice(np.arange(1, 101), size=J, replace=False)).astype(float)
    a = rng.uniform(0.0, 2.0, size=J)
    a = np.where(a == 0.0, 1.0, a)
    return n, a


def criterion_1() -> Criterion:
    r = zeta_moment(0.75, 2000.0)
    mean = r.value / 2000.0
    rel = (mean - ZETA_1_5) / ZETA_1_5
    return Criterion(1, "mean value at sigma=0.75, T=2000", abs(rel) <= 0.05, mean,
                     f"within 5% of {ZETA_1_5:.6f}",
                     {"relative_error": rel, "quad_err": r.err_est / 2000.0})


def criterion_2() -> Criterion:
    r = zeta_moment(0.5, 5000.0)
    ratio = r.value / 5000.0 / math.log(5000.0)
    return Criterion(2, "critical-line ratio to log T at T=5000", 0.75 <= ratio <= 1.10, ratio,
                     "[0.75, 1.10]", {"quad_err": r.err_est / 5000.0})


def criterion_3() -> Criterion:
    Ts = [500, 1000, 2000, 4000, 8000]
    rows = moments.moment_scan(models.power_law(0.5), 0.55, Ts)
    slope, intercept, resid = moments.growth_fit([(r.T_or_N, r.value) for r in rows])
    return Criterion(3, "sub-critical growth exponent (power law 1/2, sigma=0.55)", abs(slope - 0.8) <= 0.10,
                     slope, "0.8 +- 0.10",
                     {"values": [r.value for r in rows], "residual": resid})


def criterion_4(instances: int = 200, seed: int = 4) -> Criterion:
    rng = np.random.default_rng(seed)
    worst = 0.0
    exact_ok = fejer_ok = 0
    for i in range(instances):
        n, a = random_polynomial(rng)
        sigma = float([0.0, 0.5, 1.0][i % 3])
        T = float([10.0, 100.0][(i // 3) % 2])
        ex = moments.polynomial_mean_square_exact((n, a), math.inf, sigma, T)
        q = moments.mean_square_quadrature((n, a), sigma, -T, T)
        qv = q.value / (2 * T)
        qe = q.err_est / (2 * T)
        dev = abs(ex.value - qv)
        allowed = 1e-6 * abs(ex.value) + qe + ex.err_est
        worst = max(worst, dev / allowed)
        exact_ok += dev <= allowed
        half = moments.mean_square_quadrature((n, a), sigma, 0.0, T)
        fe = moments.fejer_mean_square((n, a), math.inf, sigma, T)
        fejer_ok += half.value / T <= fe.value + fe.err_est + half.err_est / T
    passed = exact_ok == instances and fejer_ok == instances
    return Criterion(4, "exact-sinc vs quadrature and Fejer domination", passed, worst,
                     "deviation/allowed <= 1 on all instances",
                     {"exact_ok": exact_ok, "fejer_ok": fejer_ok, "instances": instances})


def criterion_5() -> Criterion:
    r = zeta_moment(0.75, 2000.0)
    mean = r.value / 2000.0
    lower = math.fsum(n ** -1.5 for n in range(1, 21)) - 0.05
    return Criterion(5, "lower bound by the first 20 diagonal terms", mean >= lower, mean, f">= {lower:.6f}")


def criterion_6(instances: int = 100, seed: int = 6, T: float = 100.0) -> Criterion:
    rng = np.random.default_rng(seed)
    ok = 0
    worst = -math.inf
    for _ in range(instances):
        J = int(rng.integers(1, 21))
        while True:
            lam = np.sort(rng.uniform(0.0, 10.0, size=J))
            if J == 1 or np.min(np.diff(lam)) >= 1e-3:
                break
        coeffs = rng.normal(size=J) + 1j * rng.normal(size=J)
        rep = moments.mv_check(lam, coeffs, T)
        ok += rep.holds
        if rep.bound > 0:
            worst = max(worst, abs(rep.lhs - rep.diagonal) / (rep.bound + rep.err_est))
    return Criterion(6, "Montgomery-Vaughan inequality", ok == instances, worst,
                     "|lhs - diag| / (bound + err) <= 1 on all instances", {"ok": ok, "instances": instances})


def criterion_7(tau_seed: float = 1e4, sigma: float = 0.6) -> Criterion:
    m = bohr.bohr_build(0.5, (tau_seed,))
    inv = m.invariants()
    inv_ok = m.invariants_hold(1e-9)
    blk = m.blocks[0]
    peak = abs(bohr.bohr_fc(m, complex(sigma, blk.tau)))
    pred = bohr.bohr_peak_prediction(blk.tau, sigma, 0.5)
    ratio = peak / pred
    peak_ok = abs(ratio - 1.0) <= 0.15
    spec = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10, oscillation_hint=blk.logB)
    res = integrate_adaptive(lambda t: np.abs(bohr.bohr_fc(m, sigma + 1j * t)) ** 2, 0.0, blk.tau, spec)
    window = res.value / blk.tau
    comparison = moments.limit_series(models.integers(), sigma, tol=1e-6)
    comp_upper = comparison.value + comparison.err_est
    omega_ok = window > 5 * comp_upper
    return Criterion(7, "Bohr construction fidelity", inv_ok and peak_ok and omega_ok, ratio,
                     "invariants at 1e-9; |f_c| / prediction in [0.85, 1.15]; window moment > 5x comparison",
                     {"invariants": inv, "invariants_ok": inv_ok, "peak": peak, "prediction": pred,
                      "peak_ok": peak_ok, "window_moment": window, "comparison_limit": comparison.value,
                      "comparison_err": comparison.err_est, "omega_ok": omega_ok})


def criterion_8(seed: int = 8, x_max: float = 1e4) -> Criterion:
    jmax = int(x_max - 1)
    seq = models.random_discretize(models.linear_mass, jmax, seed, x_max)
    n, _ = seq.terms(seq.x_limit)
    j = np.arange(1, n.size + 1)
    M = models.linear_mass
    # A jumps only at n_j: check just before and at each jump, and at the strata ends
    dev = max(float(np.max(np.abs(j - M(n)))), float(np.max(np.abs(j - 1 - M(n)))))
    strata = seq.params["strata"]
    A_strata = np.searchsorted(n, strata, side="right")
    dev = max(dev, float(np.max(np.abs(A_strata - M(strata)))))
    worst = 0.0
    grid = {}
    for x in (1e2, 1e3, 1e4):
        for t in (1.0, 10.0, 100.0):
            _, r = models.discrepancy_ratio(seq, M, models.linear_mass_transform, x, t)
            grid[f"x={x:g},t={t:g}"] = r
            worst = max(worst, r)
    return Criterion(8, "random discretisation discrepancy", dev <= 1.0 and worst <= 10.0, worst,
                     "|A - M| <= 1 and ratio <= 10", {"max_abs_A_minus_M": dev, "ratios": grid})


def criterion_9() -> Criterion:
    Z = models.integers()
    s1 = zeros.auto_sigma1(Z)
    rz = zeros.count_zeros(Z, zeros.Rectangle(0.75, s1, 50.0))
    f = lambda s: 1.0 - np.exp((1.0 - s) * math.log(2.0))
    rp = zeros.count_zeros(f, zeros.Rectangle(0.5, 2.0, 10.0))
    integral = abs(rz.winding_raw - round(rz.winding_raw)) < 0.25
    passed = rz.count == 0 and integral and rp.count == 3
    return Criterion(9, "zero counts", passed, float(rz.count), "zeta: 0; 1 - 2^(1-s): 3",
                     {"zeta_winding": rz.winding_raw, "zeta_sigma1": s1, "poly_count": rp.count,
                      "poly_winding": rp.winding_raw})


def criterion_10() -> Criterion:
    r3 = models.eta_weighted_sum(256) / math.log(256)
    r4 = models.eta_weighted_sum(65536) / math.log(65536)
    return Criterion(10, "eta-modulated non-convergence witness", abs(r3 - r4) > 0.2, abs(r3 - r4), "> 0.2",
                     {"ratio_256": r3, "ratio_65536": r4})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run(ids=None) -> list[Criterion]:
    out = []
    for i in ids or sorted(CRITERIA):
        t0 = time.perf_counter()
        c = CRITERIA[i]()
        c.seconds = time.perf_counter() - t0
        out.append(c)
    return out

