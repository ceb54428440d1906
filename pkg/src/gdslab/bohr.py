"""Continuous counting model with oscillatory blocks.

``A_c(x) = x - 1 + sum_k R_k(x)`` where ``R_k(x) = int_{A_k}^x cos(tau_k log u) du``
on ``[A_k, B_k]`` and zero elsewhere, with ``B_k = tau_k^(1/(1-beta))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import bisect_monotone, bisect_root
from .series import PoleError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BohrBlock:
    tau: float
    A: float
    B: float
    logB: float      # exactly 2 pi m / tau
    m: int

    def antiderivative(self, u):
        """``u (cos phi + tau sin phi) / (1 + tau^2)``, ``phi = tau (log u - log B)``."""
        u = np.asarray(u, dtype=float)
        phi = self.tau * (np.log(u) - self.logB)
        return u * (np.cos(phi) + self.tau * np.sin(phi)) / (1.0 + self.tau ** 2)

    def R(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.A) & (x <= self.B)
        xc = np.clip(x, self.A, self.B)
        return np.where(inside, self.antiderivative(xc) - self.antiderivative(self.A), 0.0)


@dataclass(frozen=True)
class BohrModel:
    beta: float
    blocks: tuple[BohrBlock, ...]
    rho: float = 1.0

    def invariants(self) -> dict[str, float]:
        """Worst violations of the four construction invariants."""
        lattice = max(abs(b.tau * b.logB - TWO_PI * b.m) for b in self.blocks)
        closing = max(abs(float(b.R(b.B))) for b in self.blocks)
        gaps = [self.blocks[i + 1].A - self.blocks[i].B for i in range(len(self.blocks) - 1)]
        ratios = [b.A / b.B ** self.beta for b in self.blocks]
        return {
            "lattice": lattice,
            "closing": closing,
            "min_gap": min(gaps) if gaps else math.inf,
            "min_A_ratio": min(ratios),
            "max_A_ratio": max(ratios),
        }

    def invariants_hold(self, tol: float = 1e-9) -> bool:
        inv = self.invariants()
        return (inv["lattice"] <= tol and inv["closing"] <= tol and inv["min_gap"] > 0
                and inv["min_A_ratio"] >= 0.5 and inv["max_A_ratio"] <= 2.0)


def adjust_tau(seed: float, beta: float) -> tuple[float, int]:
    """Smallest ``tau >= seed`` with ``tau log(tau) / (1 - beta)`` in ``2 pi Z``."""
    if seed <= 1:
        raise ValueError("tau seeds must exceed 1")
    phase = lambda t: np.asarray(t) * np.log(t) / (1.0 - beta)
    m = math.ceil(float(phase(seed)) / TWO_PI)
    target = TWO_PI * m
    hi = seed
    while float(phase(hi)) < target:
        hi *= 1.5
    tau = bisect_monotone(phase, target, seed, hi, tol=seed * 1e-15)
    return float(tau), m


def _solve_A(tau: float, B: float, logB: float, beta: float, floor_u: float) -> float:
    blk = BohrBlock(tau, 1.0, B, logB, 0)
    gB = B / (1.0 + tau * tau)
    h = lambda u: float(blk.antiderivative(u)) - gB
    # |antiderivative(u)| <= u / sqrt(1 + tau^2), so no root below B / sqrt(1 + tau^2)
    u = max(0.5 * B ** beta, floor_u, B / math.sqrt(1.0 + tau * tau) * (1 - 1e-12))
    u_end = 2.0 * B ** beta
    step = TWO_PI / tau / 16.0        # relative step, 16 per phase period
    while u < u_end:
        grid = u * np.exp(step * np.arange(1, 4097))
        vals = blk.antiderivative(grid) - gB
        prev = np.concatenate([[h(u)], vals[:-1]])
        hit = np.nonzero((prev < 0) & (vals >= 0))[0]
        if hit.size:
            i = int(hit[0])
            lo = u if i == 0 else float(grid[i - 1])
            return bisect_root(h, lo, float(grid[i]), tol=1e-15 * grid[i])
        u = float(grid[-1])
    raise ValueError("no admissible A_k in [0.5 B^beta, 2 B^beta]")


def bohr_build(beta: float, tau_seed, tol: float = 1e-9) -> BohrModel:
    """Adjust each seed upward to the 2 pi lattice and close each block at ``B_k``."""
    beta = float(beta)
    if not 0 < beta < 1:
        raise ValueError("bohr_build needs 0 < beta < 1")
    seeds = [float(t) for t in tau_seed]
    if not seeds or any(b <= a for a, b in zip(seeds, seeds[1:])):
        raise ValueError("tau_seed must be a non-empty increasing list")
    blocks: list[BohrBlock] = []
    prev_B = 1.0
    for k, seed in enumerate(seeds):
        tau, m = adjust_tau(seed, beta)
        logB = TWO_PI * m / tau
        B = math.exp(logB)
        if blocks and tau / blocks[-1].tau < 10:
            warnings.warn(f"tau ratio {tau / blocks[-1].tau:.3g} < 10 between blocks {k} and {k + 1}",
                          RuntimeWarning, stacklevel=2)
        if 2.0 * B ** beta <= prev_B:
            raise ValueError(f"blocks overlap: A_{k + 1} cannot exceed B_{k} = {prev_B:g}; spread tau_seed")
        try:
            A = _solve_A(tau, B, logB, beta, prev_B * (1 + 1e-12) if blocks else 1.0)
        except ValueError as exc:
            raise ValueError(f"blocks overlap or no closing point for block {k + 1}: {exc}; spread tau_seed") from exc
        if blocks and A <= prev_B:
            raise ValueError(f"blocks overlap: A_{k + 1} <= B_{k}; spread tau_seed")
        blk = BohrBlock(tau, A, B, logB, m)
        if abs(float(blk.R(B))) > tol:
            raise ValueError(f"block {k + 1} does not close: R(B) = {float(blk.R(B)):.3g}")
        blocks.append(blk)
        prev_B = B
    return BohrModel(beta, tuple(blocks))


def bohr_Ac(model: BohrModel, x):
    """``A_c(x) = x - 1 + sum_k R_k(x)`` for ``x >= 1``, zero below."""
    x = np.asarray(x, dtype=float)
    out = x - 1.0
    for b in model.blocks:
        out = out + b.R(x)
    out = np.where(x >= 1.0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def _diff_exp_over(z, la, lb):
    """``(e^(z lb) - e^(z la)) / z`` with the small-``z`` series near zero."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-6
    zs = np.where(small, 1.0, z)
    direct = (np.exp(z * lb) - np.exp(z * la)) / zs
    d1 = lb - la
    d2 = (lb * lb - la * la) / 2.0
    d3 = (lb ** 3 - la ** 3) / 6.0
    series = d1 + z * d2 + z * z * d3
    return np.where(small, series, direct)


def _block_transform(b: BohrBlock, s, x=None):
    """``int_{A}^{min(x,B)} u^-s cos(tau log u) du`` (all of the block if ``x`` is None)."""
    la = math.log(b.A)
    if x is None:
        lb = b.logB
    else:
        lb = np.log(np.clip(np.asarray(x, dtype=float), b.A, b.B))
    zp = 1.0 + 1j * b.tau - s
    zm = 1.0 - 1j * b.tau - s
    return 0.5 * (_diff_exp_over(zp, la, lb) + _diff_exp_over(zm, la, lb))


def bohr_fc(model: BohrModel, s):
    """``f_c(s) = int_1^inf x^-s dA_c(x)`` in closed form, ``sigma > beta``, ``s != 1``."""
    s = np.asarray(s, dtype=complex)
    if np.any(s.real <= model.beta):
        raise ValueError("bohr_fc needs sigma > beta")
    if np.any(s == 1.0):
        raise PoleError("pole: f_c has a pole at s = 1")
    out = 1.0 / (s - 1.0)
    for b in model.blocks:
        out = out + _block_transform(b, s)
    return complex(out) if out.ndim == 0 else out


def bohr_partial_transform(model: BohrModel, x, s):
    """``int_1^x u^-s dA_c(u)`` in closed form (any complex ``s``)."""
    s = np.asarray(s, dtype=complex)
    x = np.asarray(x, dtype=float)
    lx = np.log(np.maximum(x, 1.0))
    out = _diff_exp_over(1.0 - s, 0.0, lx)
    for b in model.blocks:
        out = out + np.where(x > b.A, _block_transform(b, s, np.maximum(x, b.A)), 0.0)
    return complex(out) if out.ndim == 0 else out


def bohr_peak_prediction(tau: float, sigma: float, beta: float, factor: float = 1.0) -> float:
    """``factor * tau^((1-sigma)/(1-beta)) / (1-sigma)``."""
    return factor * tau ** ((1 - sigma) / (1 - beta)) / (1 - sigma)
