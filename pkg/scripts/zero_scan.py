"""Zero counts N(sigma, T) for a model, by boundary winding."""
import argparse

from gdslab import models
from gdslab.zeros import zero_density_scan

MODELS = {"integers": models.integers, "alternating": lambda: models.alternating_beta(0.5)}

ap = argparse.ArgumentParser()
ap.add_argument("--model", choices=sorted(MODELS), default="alternating")
ap.add_argument("--sigma", type=float, default=0.8)
ap.add_argument("--sigma1", type=float, default=4.0)
ap.add_argument("--T", type=float, nargs="+", default=[10, 20, 40, 80])
args = ap.parse_args()

for T, n, rep in zero_density_scan(MODELS[args.model](), args.sigma, args.T, sigma1=args.sigma1):
    print(f"T={T:g} N={n} N/T={n / T:.4f} points={rep.points}")
