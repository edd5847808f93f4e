"""Table for the discretised parity example: rotation angle, spectrum of
J'J and kappa(0) against their closed forms, for several couplings."""
import argparse
import math

import numpy as np

from subpert import bounds as bd
from subpert import scenarios as sc
from subpert.rotation_geometry import direct_rotation


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--n", type=int, default=16, help="nodes per half-line")
    p.add_argument("--coupling", type=float, nargs="+", default=[0.1, 0.5, 1.0, 2.0, 4.0])
    args = p.parse_args()

    print(f"{'coupling':>9} {'theta':>12} {'atan(c)/2':>12} {'spec err':>10} {'kappa(0)':>12}")
    for c in args.coupling:
        inst = sc.gen_ksharp(sc.KsharpGrid(args.a, c, args.n, 3.0 + args.a))
        theta = direct_rotation(inst.J, inst.Jp).theta
        z = np.linalg.eigvals(inst.Jp.J @ inst.J.J)
        e1, e2 = inst.JJprime_spectrum
        err = np.minimum(np.abs(z - e1), np.abs(z - e2)).max()
        k0 = bd.kappa_mu(inst.A, inst.V, inst.J, 0.0)
        print(f"{c:9.3f} {theta:12.9f} {0.5 * math.atan(c):12.9f} {err:10.1e} {k0:12.9f}")


if __name__ == "__main__":
    main()
