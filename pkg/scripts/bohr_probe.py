"""Peak size of the Bohr-type transform at its block heights, against the leading-order prediction."""
import argparse
import warnings

from gdslab import bohr

ap = argparse.ArgumentParser()
ap.add_argument("--beta", type=float, default=0.5)
ap.add_argument("--tau", type=float, nargs="+", default=[50.0, 2500.0])
ap.add_argument("--sigma", type=float, nargs="+", default=[0.55, 0.6, 0.7, 0.8, 0.9])
args = ap.parse_args()

with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    m = bohr.bohr_build(args.beta, args.tau)
print("invariants:", m.invariants())
print("block,tau,sigma,abs_fc,prediction,ratio")
for k, b in enumerate(m.blocks, 1):
    for s in args.sigma:
        v = abs(bohr.bohr_fc(m, complex(s, b.tau)))
        p = bohr.bohr_peak_prediction(b.tau, s, args.beta)
        print(f"{k},{b.tau:.6g},{s},{v:.6g},{p:.6g},{v / p:.4f}")
