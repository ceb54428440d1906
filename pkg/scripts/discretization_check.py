"""Discrepancy of a seeded random discretisation of M(x) = x - 1 on an (x, t) grid."""
import argparse

from gdslab import models

ap = argparse.ArgumentParser()
ap.add_argument("--seed", type=int, default=8)
ap.add_argument("--xmax", type=float, default=1e4)
args = ap.parse_args()

seq = models.random_discretize(models.linear_mass, int(args.xmax - 1), args.seed, args.xmax)
print("x,t,abs_S_minus_I,ratio")
for x in (1e2, 1e3, 1e4):
    for t in (1.0, 10.0, 100.0):
        d, r = models.discrepancy_ratio(seq, models.linear_mass, models.linear_mass_transform, x, t)
        print(f"{x:g},{t:g},{d:.6g},{r:.4f}")
