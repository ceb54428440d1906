"""Normalised second moment of zeta(sigma+it) against T, with the diagonal limit and a two-term prediction."""
import argparse
import math

import mpmath

from gdslab import models
from gdslab.moments import limit_series, moment_scan

ap = argparse.ArgumentParser()
ap.add_argument("--sigma", type=float, default=0.75)
ap.add_argument("--T", type=float, nargs="+", default=[250, 500, 1000, 2000, 4000])
args = ap.parse_args()

Z = models.integers()
lim = limit_series(Z, args.sigma, tol=1e-8)
k = float(mpmath.zeta(2 * args.sigma - 1)) * (2 * math.pi) ** (2 * args.sigma - 1) / (2 - 2 * args.sigma)
print(f"limit = {lim.value:.10g} +- {lim.err_est:.2g}")
print("T,mean,err,two_term_prediction,rel_to_limit")
for r in moment_scan(Z, args.sigma, args.T):
    pred = lim.value + k * r.T_or_N ** (1 - 2 * args.sigma)
    print(f"{r.T_or_N:g},{r.value:.10g},{r.err_est:.2g},{pred:.10g},{r.value / lim.value - 1:+.4f}")
