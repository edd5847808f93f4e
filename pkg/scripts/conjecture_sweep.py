"""Empirical look at the region d <= ||V|| < sqrt(2) d of annular problems.

The a priori formula ``||V|| / sqrt(d^2 + ||V||^2)`` is only established for
``||V|| < d``.  This script evaluates the ratio ``actual_gap / formula`` on
random annular instances (and on the 4x4 family) beyond that range.  It
reports observations only; nothing is asserted.
"""
import argparse
import math

import numpy as np

from subpert import bounds as bd
from subpert import scenarios as sc


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=12, help="maximal dimension")
    args = p.parse_args()

    ratios = []
    for i in range(args.trials):
        base = sc.random_spec(args.seed, i, "annular", args.n)
        rng = sc.stream(args.seed, i + (1 << 33))
        v = base.d * float(rng.uniform(1.0, math.sqrt(2)))
        inst = sc.gen_random(sc.RandomSpec(base.n_minus, base.n_plus, "annular", base.d,
                                           base.gap_len, base.spectrum_spread, v, args.seed, i))
        rep = bd.analyze(inst.A, inst.V, inst.split)
        if rep.actual_gap is not None:
            ratios.append(rep.actual_gap / (v / math.hypot(base.d, v)))
    ratios = np.array(ratios)
    print(f"random annular, d <= |V| < sqrt(2) d: {ratios.size} instances with a rotation")
    print(f"  max ratio gap/formula = {ratios.max():.6f}, median = {np.median(ratios):.6f}")

    worst = 0.0
    for a in np.linspace(0.0, 0.9, 10):
        d = 1.0 - a
        for frac in np.linspace(1.0, math.sqrt(2), 20, endpoint=False):
            v = frac * d
            if v * v >= 1.0 - a * a:
                continue
            t = sc.tsharp_max_theta(a, 1.0, v)
            worst = max(worst, math.sin(t) / (v / math.hypot(d, v)))
    print(f"4x4 family, same region: max ratio gap/formula = {worst:.6f}")


if __name__ == "__main__":
    main()
