"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line (printed in the pytest terminal summary,
or directly when this file is run as a script) and asserts both the
numerical tolerance and the runtime budget.
"""
import math
import time

import numpy as np
import pytest

from subpert import bounds as bd
from subpert import matio
from subpert import scenarios as sc
from subpert import verify as vf
from subpert.cli import main
from subpert.spectral_core import involution_from_split

RESULTS: list[str] = []
SEED = 20240917


def record(number: int, title: str, ok: bool, elapsed: float, budget: float, detail: str):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    line = (f"criterion {number:>2} [{status}] {title}: {detail} "
            f"({elapsed:.1f}s, budget {budget:.0f}s)")
    RESULTS.append(line)
    print(line)
    return status == "PASS"


def suite(trial, trials, seed=SEED, n_max=64):
    return vf.run_checks("acceptance", trial, trials, seed, n_max)


def worst(res, *names):
    return min(res.checks[n].worst for n in names if n in res.checks)


def test_criterion_01_direct_rotation():
    t0 = time.perf_counter()
    res = suite(vf._rotation_pair, 200)
    names = ("rotation.unitary", "rotation.intertwines", "rotation.square",
             "rotation.re_nonnegative", "rotation.gap_identity")
    elapsed = time.perf_counter() - t0
    ok = all(res.checks[n].failed == 0 and res.checks[n].passed == 200 for n in names)
    assert record(1, "direct-rotation contract, 200 pairs n<=64", ok, elapsed, 30,
                  f"worst margin {worst(res, *names):+.2e}"), res.format()


def test_criterion_02_unitary_identities():
    t0 = time.perf_counter()
    res = suite(vf._rotation_unitaries, 200)
    elapsed = time.perf_counter() - t0
    assert res.trials == 200
    assert record(2, "norm identity and subadditivity, 200 unitaries/pairs", res.ok, elapsed, 10,
                  f"worst margin {worst(res, *res.checks):+.2e}"), res.format()


def _transfer(res, seed, i, n_max, inject):
    rng = vf.trial_rng(seed, "transfer", i)
    inst = sc.gen_relemma_instance(int(rng.integers(2, n_max + 1)), seed, i)
    from subpert.spectral_core import accretivity_margin, polar_decompose
    W = polar_decompose(inst.T).W
    res.add("GW", accretivity_margin(inst.G @ W) + 1e-9)
    res.add("WG", accretivity_margin(W @ inst.G) + 1e-9)


def test_criterion_03_polar_transfer():
    t0 = time.perf_counter()
    res = suite(_transfer, 200)
    elapsed = time.perf_counter() - t0
    ok = res.ok and res.checks["GW"].passed == 200 and res.checks["WG"].passed == 200
    assert record(3, "accretivity transfers to the polar factor, 200 instances", ok, elapsed, 20,
                  f"worst margin {worst(res, 'GW', 'WG'):+.2e}"), res.format()


def test_criterion_04_subordinated_dominance():
    t0 = time.perf_counter()
    res = suite(vf.check_subordinated, 500)
    elapsed = time.perf_counter() - t0
    names = ("subordinated.gap_le_estin", "subordinated.estin_le_dk")
    ok = all(res.checks[n].passed == 500 for n in names)
    assert record(4, "gap <= sin(atan(kappa)/2) <= sin(atan(2|V|/d)/2), 500 instances", ok,
                  elapsed, 60, f"worst margin {worst(res, *names):+.2e}"), res.format()


def _tsharp_sweep_max_ratio(tmp_path):
    out = tmp_path / "tsharp.csv"
    assert main(["sweep", "--scenario", "tsharp", "--a", "0", "--b", "1", "--steps", "100",
                 "--out", str(out)]) == 0
    header, rows = matio.parse_csv(out.read_text())
    return max(r[header.index("ratio")] for r in rows)


def test_criterion_05_apriori_dominance_and_sharpness(tmp_path):
    t0 = time.perf_counter()
    res = suite(vf.check_annular_apriori, 500)
    max_ratio = _tsharp_sweep_max_ratio(tmp_path)
    elapsed = time.perf_counter() - t0
    ok = res.checks["annular.gap_le_apriori"].passed == 500 and max_ratio >= 1 - 1e-6
    assert record(5, "a priori tan bound on 500 annular instances; 4x4 family attains it", ok,
                  elapsed, 60, f"worst margin {worst(res, 'annular.gap_le_apriori'):+.2e}, "
                               f"max sweep ratio {max_ratio:.9f}"), res.format()


def test_criterion_06_piecewise_kappa():
    t0 = time.perf_counter()
    res = suite(vf.check_annular_trio, 500)
    errs_max, errs_min = [], []
    for a in (0.0, 0.2, 0.4, 0.6, 0.8):
        for frac in (0.2, 0.5, 0.8, 0.95):
            b = 1.0
            d = b - a
            v = frac * math.sqrt(d * (2 * b - d))
            kp = bd.kappa_piecewise(v, d, 2 * b)
            errs_max.append(abs(sc.tsharp_max_theta(a, b, v) - 0.5 * math.atan(kp)))
            errs_min.append(abs(bd.varkappa_min(a, b, v)[0] - kp) / max(kp, 1.0))
    elapsed = time.perf_counter() - t0
    ok = (res.checks["annular.theta_le_trio"].passed == 500 and max(errs_max) <= 1e-6
          and max(errs_min) <= 1e-6 and len(errs_max) == 20)
    assert record(6, "theta <= atan(kappa(|V|))/2; 4x4 maximum and mu-minimum reproduce kappa(|V|)",
                  ok, elapsed, 90, f"worst margin {worst(res, 'annular.theta_le_trio'):+.2e}, "
                                   f"max-theta err {max(errs_max):.1e}, "
                                   f"min-varkappa err {max(errs_min):.1e}"), res.format()


def test_criterion_07_parity_example():
    t0 = time.perf_counter()
    res = vf.SuiteResult("ksharp")
    for c in (0.1, 0.5, 1.0, 2.0, 4.0):
        for N in (1, 8, 64):
            vf.check_ksharp(res, c, N)
    elapsed = time.perf_counter() - t0
    names = ("ksharp.spectrum", "ksharp.theta", "ksharp.kappa_at_zero")
    ok = all(res.checks[n].passed == 15 for n in names)
    assert record(7, "spec(J'J), theta and kappa(0) exact on 15 discretisations", ok, elapsed, 10,
                  f"worst margin {worst(res, *names):+.2e}"), res.format()


def test_criterion_08_enclosures():
    t0 = time.perf_counter()
    res = vf.SuiteResult("enclosure")
    for i in range(500):
        vf.check_annular_apriori(res, SEED, i, 64)
        vf.check_annular_trio(res, SEED, i, 64)
    elapsed = time.perf_counter() - t0
    names = ("enclosure.minus_inside", "enclosure.plus_outside_gap")
    ok = all(res.checks[n].failed == 0 for n in names) and res.checks[names[0]].passed >= 500
    assert record(8, "perturbed spectra respect the delta enclosures and the gap", ok, elapsed, 30,
                  f"{res.checks[names[0]].passed} instances, worst margin {worst(res, *names):+.2e}"
                  ), res.format()


def test_criterion_09_kappa_vs_sampling():
    t0 = time.perf_counter()
    worst_rel, exceed = 0.0, True
    for i in range(100):
        rng = sc.stream(SEED, i)
        d = float(rng.uniform(0.2, 2.0))
        inst = sc.gen_random(sc.RandomSpec(1, 1, "subordinated", d, None, 1.0,
                                           float(rng.uniform(0.1, 3.0)), SEED, i))
        J = involution_from_split(inst.A, inst.split)
        lo, hi = inst.split.sup_minus, inst.split.inf_plus
        mu = lo + (hi - lo) * rng.uniform(0.1, 0.9)
        k = bd.kappa_mu(inst.A, inst.V, J, mu)
        lam, Q = np.linalg.eigh(inst.A)
        D = (Q * np.abs(lam - mu)) @ Q.conj().T
        X = rng.standard_normal((2, 10_000)) + 1j * rng.standard_normal((2, 10_000))
        num = np.abs(np.einsum("ij,ij->j", X.conj(), J.J @ inst.V @ X))
        den = np.einsum("ij,ij->j", X.conj(), D @ X).real
        sampled = float((num / den).max())
        exceed &= k >= sampled * (1 - 1e-12)
        worst_rel = max(worst_rel, (k - sampled) / k)
    elapsed = time.perf_counter() - t0
    ok = exceed and worst_rel <= 1e-2
    assert record(9, "closed-form kappa(mu) bounds and matches 1e4-sample sup, 100 instances", ok,
                  elapsed, 60, f"worst relative gap {worst_rel:.1e}")


def test_criterion_10_determinism(tmp_path):
    t0 = time.perf_counter()
    runs = [
        ["sweep", "--scenario", "random-subordinated", "--steps", "3", "--trials", "3", "--n", "12"],
        ["sweep", "--scenario", "random-annular", "--steps", "3", "--trials", "3", "--n", "12"],
        ["sweep", "--scenario", "tsharp", "--a", "0.3", "--steps", "10"],
        ["verify", "--suite", "all", "--trials", "5", "--n", "12"],
    ]
    same = True
    for k, argv in enumerate(runs):
        outs = []
        for rep in range(2):
            out = tmp_path / f"run{k}_{rep}.txt"
            assert main(argv + ["--seed", "7", "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        same &= outs[0] == outs[1] and len(outs[0]) > 0
    elapsed = time.perf_counter() - t0
    assert record(10, "sweep and verify outputs are byte-identical across runs", same, elapsed, 30,
                  f"{len(runs)} commands compared")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
