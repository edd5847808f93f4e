"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 a required condition is not met (the
report is still written), 3 a verification suite failed.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bounds as bd
from . import config, matio
from . import scenarios as sc
from . import verify
from .errors import ConditionViolated, InputError, NotAcute, SubpertError
from .numrange import numrange_boundary
from .rotation_geometry import acute_case, direct_rotation, projection_gap
from .spectral_core import Involution
from .split import Disposition

EXIT_OK, EXIT_INPUT, EXIT_CONDITION, EXIT_VERIFY = 0, 1, 2, 3
SWEEP_SCENARIOS = ("tsharp", "ksharp", "random-subordinated", "random-annular")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are input errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _positive_int(name, value) -> int:
    if value is None or value < 1:
        raise InputError(f"--{name} must be >= 1 (got {value})")
    return value


# ------------------------------------------------------------------ commands

def cmd_bounds(args) -> int:
    A = matio.read_matrix(args.matrix_a)
    V = matio.read_matrix(args.matrix_v)
    split = matio.read_split(args.split)
    rep = bd.analyze(A, V, split, grid=args.grid)
    _emit(matio.dump_json(rep.to_dict()), args.out)
    if rep.disposition == Disposition.ANNULAR.value and not rep.conditions["apriori_tan"]:
        return EXIT_CONDITION
    return EXIT_OK


def cmd_rotation(args) -> int:
    J = Involution.from_matrix(matio.read_matrix(args.j))
    Jp = Involution.from_matrix(matio.read_matrix(args.jp))
    rep = acute_case(J, Jp)
    out = {"acute": rep.acute, "smin_IplusJJ": rep.smin_IplusJJ,
           "max_diff_action": rep.max_diff_action, "minus_one_margin": rep.minus_one_margin}
    code = EXIT_OK
    if rep.acute:
        rot = direct_rotation(J, Jp)
        out.update(theta=rot.theta, projection_gap=projection_gap(J.P_minus, Jp.P_minus),
                   U=matio.matrix_to_dict(rot.U))
    else:
        code = EXIT_CONDITION
    _emit(matio.dump_json(out), args.out)
    return code


def cmd_numrange(args) -> int:
    T = matio.read_matrix(args.matrix_a)
    B = numrange_boundary(T, args.m)
    rows = [(float(t), float(z.real), float(z.imag)) for t, z in zip(B.angles, B.points)]
    _emit(matio.csv_text(("angle", "re", "im"), rows), args.out)
    return EXIT_OK


def _ratio(num, den):
    if num is None or den is None:
        return None
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return num / den


def _linspace(lo, hi, steps):
    if steps < 2:
        raise InputError(f"--steps must be >= 2 (got {steps})")
    return np.linspace(lo, hi, steps)


def _sweep_tsharp(args):
    a, b = args.a if args.a is not None else 0.0, args.b if args.b is not None else 1.0
    vmax = 0.99 * math.sqrt(max(b * b - a * a, 0.0))
    header = ("v", "v1", "v2", "actual_gap", "theta_U", "theta_max", "bound_apriori",
              "bound_trio", "ratio")
    rows = []
    for v in _linspace(0.0, vmax, args.steps):
        theta_max, s = sc.tsharp_maximizer(a, b, float(v))
        v1, v2 = (v + s) / 2, (v - s) / 2
        inst = sc.gen_tsharp(sc.TsharpParams(a, b, max(v1, 0.0), max(v2, 0.0)))
        rep = bd.analyze(inst.A, inst.V, inst.split)
        rows.append((float(v), float(v1), float(v2), rep.actual_gap, rep.theta_U, theta_max,
                     rep.bound_apriori, rep.bound_trio, rep.sharpness_ratio))
    return header, rows


def _sweep_ksharp(args):
    a = args.a if args.a is not None else 0.5
    top = args.coupling if args.coupling is not None else 4.0
    N = args.n or 8
    header = ("coupling", "actual_gap", "theta_U", "kappa_inf", "bound_estin", "bound_dk", "ratio")
    rows = []
    for c in _linspace(0.0, top, args.steps):
        inst = sc.gen_ksharp(sc.KsharpGrid(a, float(c), N, max(3.0, 2 * a + 1)))
        rep = bd.analyze(inst.A, inst.V, inst.split)
        rows.append((float(c), rep.actual_gap, rep.theta_U, rep.kappa_inf, rep.bound_estin,
                     rep.bound_dk, rep.sharpness_ratio))
    return header, rows


def _sweep_random(args, disposition: Disposition):
    trials = _positive_int("trials", args.trials if args.trials is not None else 10)
    d = args.d if args.d is not None else 1.0
    n_max = args.n or 16
    annular = disposition is Disposition.ANNULAR
    gap = args.gap if args.gap is not None else 3.0 * d
    top = 1.4 if annular else 2.0  # multiples of d; 1.4 reaches into d <= ||V|| < sqrt(2) d
    header = ["v_over_d", "trial", "n", "actual_gap", "theta_U", "kappa_inf", "bound_estin",
              "bound_dk", "bound_apriori", "bound_trio", "ratio"]
    if annular:
        header += ["apriori_formula_ratio", "conjecture_region"]
    rows = []
    for k, r in enumerate(_linspace(0.0, top, args.steps)):
        for t in range(trials):
            base = sc.random_spec(args.seed, k * trials + t, disposition, n_max)
            spec = sc.RandomSpec(base.n_minus, base.n_plus, disposition, d,
                                 gap if annular else None, base.spectrum_spread,
                                 float(r * d), args.seed, k * trials + t)
            inst = sc.gen_random(spec)
            rep = bd.analyze(inst.A, inst.V, inst.split)
            row = [float(r), t, rep.n, rep.actual_gap, rep.theta_U, rep.kappa_inf,
                   rep.bound_estin, rep.bound_dk, rep.bound_apriori, rep.bound_trio,
                   rep.sharpness_ratio]
            if annular:
                formula = rep.norm_V / math.hypot(d, rep.norm_V)
                row += [_ratio(rep.actual_gap, formula), bool(d <= rep.norm_V < math.sqrt(2) * d)]
            rows.append(row)
    return header, rows


def cmd_sweep(args) -> int:
    if args.scenario not in SWEEP_SCENARIOS:
        raise InputError(f"--scenario must be one of {', '.join(SWEEP_SCENARIOS)}")
    if args.trials is not None and args.trials < 1:
        raise InputError(f"--trials must be >= 1 (got {args.trials})")
    if args.scenario == "tsharp":
        header, rows = _sweep_tsharp(args)
    elif args.scenario == "ksharp":
        header, rows = _sweep_ksharp(args)
    else:
        header, rows = _sweep_random(args, Disposition(args.scenario.split("-")[1]))
    _emit(matio.csv_text(header, rows), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    trials = _positive_int("trials", args.trials if args.trials is not None else 20)
    if args.suite != "all" and args.suite not in verify.SUITES:
        raise InputError(f"--suite must be 'all' or one of {', '.join(sorted(verify.SUITES))}")
    results = verify.run_suite(args.suite, trials, args.seed, args.n or 16, args.inject or ())
    ok = all(r.ok for r in results)
    text = "\n".join(r.format() for r in results)
    text += f"\noverall: {'PASS' if ok else 'FAIL'}\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_scenario(args) -> int:
    if not args.out:
        raise InputError("--out (output directory) is required for 'scenario'")
    info = {"scenario": args.scenario}
    if args.scenario == "tsharp":
        p = sc.TsharpParams(args.a if args.a is not None else 0.0,
                            args.b if args.b is not None else 1.0,
                            args.v1 if args.v1 is not None else 0.25,
                            args.v2 if args.v2 is not None else 0.25)
        inst = sc.gen_tsharp(p)
        A, V, split = inst.A, inst.V, inst.split
        info["theta_closed_form"] = inst.theta_closed_form
    elif args.scenario == "ksharp":
        a = args.a if args.a is not None else 0.5
        inst = sc.gen_ksharp(sc.KsharpGrid(a, args.coupling if args.coupling is not None else 1.0,
                                           args.n or 8, max(3.0, 2 * a + 1)))
        A, V, split = inst.A, inst.V, inst.split
        info["theta_exact"] = inst.theta_exact
    elif args.scenario in ("random-subordinated", "random-annular"):
        disposition = Disposition(args.scenario.split("-")[1])
        d = args.d if args.d is not None else 1.0
        n = args.n or 8
        if n < 2:
            raise InputError("--n must be >= 2")
        n_minus = max(1, n // 3)
        gap = args.gap if args.gap is not None else (3.0 * d if disposition is Disposition.ANNULAR
                                                     else None)
        v = args.v1 if args.v1 is not None else 0.5 * d
        inst = sc.gen_random(sc.RandomSpec(n_minus, n - n_minus, disposition, d, gap, 1.0, v,
                                           args.seed))
        A, V, split = inst.A, inst.V, inst.split
    else:
        raise InputError(f"--scenario must be one of {', '.join(SWEEP_SCENARIOS)}")
    info["files"] = matio.write_instance(args.out, A, V, split)
    sys.stdout.write(matio.dump_json(info))
    return EXIT_OK


# -------------------------------------------------------------------- parser

def _tol_override(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip().lower(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance value {value!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="subpert", description="Subspace perturbation bounds and verification.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (directory for 'scenario')")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", action="append", type=_tol_override, default=[],
                        metavar="NAME=VALUE", help="tolerance override (repeatable)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", parents=[common], help="analyse an instance (JSON report)")
    b.add_argument("--matrix-a", required=True)
    b.add_argument("--matrix-v", required=True)
    b.add_argument("--split", required=True)
    b.add_argument("--grid", type=int, default=256, help="mu-grid size for kappa minimisation")
    b.set_defaults(func=cmd_bounds)

    r = sub.add_parser("rotation", parents=[common], help="direct rotation between involutions")
    r.add_argument("--j", required=True)
    r.add_argument("--jp", required=True)
    r.set_defaults(func=cmd_rotation)

    nr = sub.add_parser("numrange", parents=[common], help="numerical-range boundary (CSV)")
    nr.add_argument("--matrix-a", required=True)
    nr.add_argument("--m", type=int, default=720, help="number of support angles")
    nr.set_defaults(func=cmd_numrange)

    scen_params = argparse.ArgumentParser(add_help=False)
    scen_params.add_argument("--scenario", required=True)
    for flag in ("--a", "--b", "--v1", "--v2", "--coupling", "--d", "--gap"):
        scen_params.add_argument(flag, type=float)
    scen_params.add_argument("--n", type=int)

    sw = sub.add_parser("sweep", parents=[common, scen_params], help="parameter sweep (CSV)")
    sw.add_argument("--steps", type=int, default=20)
    sw.add_argument("--trials", type=int)
    sw.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="run property suites")
    v.add_argument("--suite", default="all")
    v.add_argument("--trials", type=int)
    v.add_argument("--n", type=int, help="maximal dimension of random instances")
    v.add_argument("--inject", action="append", choices=verify.INJECTIONS,
                   help="negative control: deliberately corrupt a computed quantity")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scenario", parents=[common, scen_params],
                       help="dump an instance as matrix JSON plus split descriptor")
    s.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return int(exc.code or 0)
    saved = config.current()
    try:
        if args.tol:
            config.set_tolerances(saved.replace(**dict(args.tol)))
        return args.func(args)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, InputError) or not isinstance(exc, SubpertError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        raise
    except (ConditionViolated, NotAcute) as exc:
        print(f"condition not met: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (SubpertError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        config.set_tolerances(saved)


if __name__ == "__main__":
    sys.exit(main())
