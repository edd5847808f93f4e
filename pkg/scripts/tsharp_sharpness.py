"""Sharpness of the annular bounds on the 4x4 family.

For each inner half-width ``a`` (with ``b = 1``) sweep ``||V||`` over the
admissible range, maximise the rotation angle over ``v1 - v2`` and compare
with ``arctan(kappa(||V||)) / 2`` and, for ``||V|| < d``, the a priori
``arctan(||V|| / d)``.
"""
import argparse
import math

import numpy as np

from subpert import bounds as bd
from subpert import scenarios as sc


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--a", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75])
    args = p.parse_args()

    print(f"{'a':>6} {'max |theta_max - atan(kappa)/2|':>34} {'max theta_max / atan(|V|/d)':>30}")
    for a in args.a:
        b, d = args.b, args.b - a
        vmax = 0.999 * math.sqrt(d * (2 * b - d))
        err, ratio = 0.0, 0.0
        for v in np.linspace(0.0, vmax, args.steps):
            t = sc.tsharp_max_theta(a, b, float(v))
            err = max(err, abs(t - 0.5 * math.atan(bd.kappa_piecewise(float(v), d, 2 * b))))
            if 0 < v < d:
                ratio = max(ratio, t / math.atan(v / d))
        print(f"{a:6.3f} {err:34.2e} {ratio:30.9f}")


if __name__ == "__main__":
    main()
