"""Growth exponent of the mean square below the critical line for the power-law family."""
import argparse

from gdslab import models
from gdslab.moments import growth_fit, moment_scan

ap = argparse.ArgumentParser()
ap.add_argument("--alpha", type=float, default=0.5)
ap.add_argument("--sigma", type=float, default=0.55)
ap.add_argument("--T", type=float, nargs="+", default=[500, 1000, 2000, 4000, 8000])
args = ap.parse_args()

P = models.power_law(args.alpha)
b = P.beta
rows = moment_scan(P, args.sigma, args.T)
for r in rows:
    print(f"T={r.T_or_N:g} mean={r.value:.8g} err={r.err_est:.2g}")
slope, icpt, rms = growth_fit([(r.T_or_N, r.value) for r in rows])
print(f"slope={slope:.4f} predicted={(1 + b - 2 * args.sigma) / (1 - b):.4f} rms={rms:.3g}")
