"""Randomised property suites.

Every check reports a signed *margin*: the slack by which an invariant holds
(>= 0 passes, < 0 fails).  Each trial draws its randomness from
``(seed, suite, trial)`` so results do not depend on execution order.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.linalg import expm

from . import bounds as bd
from . import scenarios as sc
from .errors import NotAcute
from .numrange import (numrange_boundary, pair_compression, sample_numrange, sector_bound)
from .rotation_geometry import acute_case, direct_rotation, projection_gap, spectral_angle
from .spectral_core import (Involution, accretivity_margin, hermitian_part, involution_from_split,
                            opnorm, polar_decompose, sign_involution)
from .split import Disposition

INJECTIONS = ("non-unitary",)


def trial_rng(seed: int, suite: str, trial: int) -> np.random.Generator:
    tag = int.from_bytes(suite.encode(), "little")
    return np.random.default_rng(np.random.SeedSequence([seed & sc.SEED_MASK, tag, trial]))


@dataclass
class CheckStats:
    passed: int = 0
    failed: int = 0
    worst: float = math.inf

    def add(self, margin: float) -> None:
        margin = float(margin)
        if margin >= 0:
            self.passed += 1
        else:
            self.failed += 1
        self.worst = min(self.worst, margin)


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    checks: dict = field(default_factory=dict)

    def add(self, check: str, margin: float) -> None:
        self.checks.setdefault(check, CheckStats()).add(margin)

    @property
    def failed(self) -> int:
        return sum(s.failed for s in self.checks.values())

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def format(self) -> str:
        total = sum(s.passed + s.failed for s in self.checks.values())
        lines = [f"suite {self.name}: {self.trials} trials, {total} checks, "
                 f"{self.failed} failed -> {'PASS' if self.ok else 'FAIL'}"]
        for name in sorted(self.checks):
            s = self.checks[name]
            status = "ok  " if s.failed == 0 else "FAIL"
            lines.append(f"  {status} {name:<36} {s.passed:>5}/{s.passed + s.failed:<5} "
                         f"worst margin {s.worst:+.3e}")
        return "\n".join(lines)


def _dim(rng, n_max: int, lo: int = 1) -> int:
    return int(rng.integers(lo, max(n_max, lo) + 1))


# ---------------------------------------------------------------- rotation

def _rotation_pair(res: SuiteResult, seed, i, n_max, inject):
    rng = trial_rng(seed, "rotation", i)
    n = _dim(rng, n_max)
    J, Jp = sc.gen_involution_pair(n, seed, i, acute=True)
    rep = acute_case(J, Jp)
    rot = direct_rotation(J, Jp)
    U = rot.U * (1 + 1e-3) if "non-unitary" in inject else rot.U
    I = np.eye(n)
    JJ = Jp.J @ J.J
    res.add("rotation.unitary", 1e-9 - opnorm(U.conj().T @ U - I))
    res.add("rotation.intertwines", 1e-9 - opnorm(Jp.J @ U - U @ J.J))
    res.add("rotation.square", 1e-9 - opnorm(U @ U - JJ))
    res.add("rotation.re_nonnegative", np.linalg.eigvalsh(hermitian_part(U))[0] + 1e-9)
    res.add("rotation.re_half_abs", 1e-9 - opnorm(hermitian_part(U)
                                                  - 0.5 * polar_decompose(I + JJ).absT))
    res.add("rotation.half_angle", 1e-9 - abs(rot.theta - 0.5 * spectral_angle(JJ)))
    res.add("rotation.operator_angle", 1e-9 - abs(opnorm(rot.operator_angle) - rot.theta))
    res.add("rotation.uniqueness", 1e-9 - opnorm(U - JJ @ U.conj().T))
    res.add("rotation.gap_identity",
            1e-9 - abs(projection_gap(J.P_minus, Jp.P_minus) - math.sin(rot.theta)))
    s = rep.smin_IplusJJ
    res.add("acute.criteria_consistent",
            1e-9 - max(abs(rep.max_diff_action**2 + s * s - 4), abs(rep.minus_one_margin - s * s / 2)))

    # every intertwiner J'W = WJ is U X with X unitary commuting with J; U is closest to I
    lam, Q = np.linalg.eigh(J.J)
    k = int((lam < 0).sum())
    X = np.zeros((n, n), dtype=complex)
    eps = rng.uniform(0.0, 0.5)  # small X probes the neighbourhood of U
    for sl in (slice(0, k), slice(k, n)):
        m = sl.stop - sl.start
        if m:
            X[sl, sl] = expm(1j * eps * sc.random_hermitian(m, rng))
    W = rot.U @ Q @ X @ Q.conj().T
    res.add("rotation.extremal", opnorm(I - W) - opnorm(I - rot.U) + 1e-9)

    # commuting pairs are acute only when equal
    flips = rng.random(n) < (0.3 if rng.random() < 0.5 else 0.0)
    Jc = Involution.from_minus_projection(
        (Q * np.where(flips, lam > 0, lam < 0)) @ Q.conj().T)
    acute = acute_case(J, Jc).acute
    ok = acute != flips.any() and (not acute or opnorm(J.J - Jc.J) <= 1e-9)
    res.add("acute.commuting_equal", 0.0 if ok else -1.0)


def _rotation_unitaries(res: SuiteResult, seed, i, n_max, inject):
    rng = trial_rng(seed, "unitary", i)
    n = _dim(rng, n_max)

    def draw():
        if rng.random() < 0.5:
            return sc.random_unitary(n, rng)
        H = sc.random_hermitian(n, rng)
        return expm(1j * rng.uniform(0, math.pi) * H / max(opnorm(H), 1e-300))

    W1, W2 = draw(), draw()
    t1, t2, t12 = spectral_angle(W1), spectral_angle(W2), spectral_angle(W2 @ W1)
    res.add("unitary.norm_identity", 1e-9 - abs(opnorm(np.eye(n) - W1) - 2 * math.sin(t1 / 2)))
    res.add("unitary.subadditive", t1 + t2 - t12 + 1e-9)
    res.add("unitary.reverse_triangle", t12 - abs(t1 - t2) + 1e-9)


def _rotation_trial(res, seed, i, n_max, inject):
    _rotation_pair(res, seed, i, n_max, inject)
    _rotation_unitaries(res, seed, i, n_max, inject)


# ----------------------------------------------------------------- relemma

def _relemma_trial(res: SuiteResult, seed, i, n_max, inject):
    rng = trial_rng(seed, "relemma", i)
    n = _dim(rng, n_max, 2)
    inst = sc.gen_relemma_instance(n, seed, i)
    W = polar_decompose(inst.T).W
    res.add("transfer.GW_accretive", accretivity_margin(inst.G @ W) + 1e-9)
    res.add("transfer.WG_accretive", accretivity_margin(W @ inst.G) + 1e-9)
    res.add("transfer.polar_is_sign", 1e-9 - opnorm(W - sign_involution(inst.T, 0.0).J))

    # polar factor of a rank-deficient matrix
    r = int(rng.integers(0, n + 1))
    X, Y = sc.random_unitary(n, rng), sc.random_unitary(n, rng)
    s = np.zeros(n)
    s[:r] = rng.uniform(0.1, 10.0, r)
    T = (X * s) @ Y.conj().T
    pp = polar_decompose(T)
    scale = max(opnorm(T), 1.0)
    Pker = Y[:, r:] @ Y[:, r:].conj().T
    res.add("polar.residual", 1e-10 * scale - opnorm(pp.W @ pp.absT - T))
    res.add("polar.partial_isometry", 1e-9 - opnorm(pp.W.conj().T @ pp.W - (np.eye(n) - Pker)))
    res.add("polar.zero_on_kernel", 1e-9 - opnorm(pp.W @ Pker))
    res.add("polar.kernel_dim", 0.0 if pp.kernel_dim == n - r else -1.0)


# ------------------------------------------------------------------ bounds

def check_subordinated(res: SuiteResult, seed, i, n_max, inject=()):
    spec = sc.random_spec(seed, i, Disposition.SUBORDINATED, n_max)
    inst = sc.gen_random(spec)
    rep = bd.analyze(inst.A, inst.V, inst.split)
    res.add("subordinated.gap_le_estin", rep.bound_estin + 1e-9 - rep.actual_gap)
    res.add("subordinated.gap_le_dk", rep.bound_dk + 1e-9 - rep.actual_gap)
    res.add("subordinated.estin_le_dk", rep.bound_dk + 1e-9 - rep.bound_estin)
    J = involution_from_split(inst.A, inst.split)
    mid = 0.5 * (inst.split.sup_minus + inst.split.inf_plus)
    k_mid = bd.kappa_mu(inst.A, inst.V, J, mid)
    res.add("subordinated.kappa_inf_le_midpoint", k_mid + 1e-12 * max(1.0, k_mid) - rep.kappa_inf)
    return rep


def check_wrong_involution(res: SuiteResult, seed, i, n_max, inject=()):
    """Balanced subordinated instance so that ``(J, -J')`` is generically acute."""
    rng = trial_rng(seed, "wrong", i)
    m = _dim(rng, max(n_max // 2, 1))
    base = sc.random_spec(seed, i, Disposition.SUBORDINATED, n_max)
    spec = dataclasses.replace(base, n_minus=m, n_plus=m, index=base.index + (1 << 20))
    inst = sc.gen_random(spec)
    J, Jp = bd.perturbed_involution(inst.A, inst.V, inst.split)
    kappa, _ = bd.kappa_inf(inst.A, inst.V, inst.split)
    try:
        wrong = direct_rotation(J, -Jp)
    except NotAcute:
        return
    res.add("wrong_involution.lower_bound",
            wrong.theta - bd.lower_bound_wrong_involution(kappa) + 1e-9)
    z = np.linalg.eigvals(Jp.J @ J.J)
    exact = math.pi / 2 - 0.5 * np.abs(np.angle(z)).min()
    res.add("wrong_involution.spectral_relation", 1e-9 - abs(wrong.theta - exact))


def _enclosure_margins(res: SuiteResult, rep: bd.BoundReport, inst):
    if not rep.enclosure_guaranteed:
        return
    sp = inst.split
    lo, hi = sp.inf_minus - rep.delta_minus, sp.sup_minus + rep.delta_plus
    alpha, beta = sp.gap
    ev = np.linalg.eigvalsh(inst.A + inst.V)
    n_minus = int(sp.classify(np.linalg.eigvalsh(inst.A), 1e-9 * max(1.0, np.abs(ev).max())).sum())
    dist = np.maximum(lo - ev, ev - hi)  # <= 0 inside the enclosure
    order = np.argsort(dist, kind="stable")
    inside, outside = ev[order[:n_minus]], ev[order[n_minus:]]
    res.add("enclosure.minus_inside", 1e-9 - max(dist[order[:n_minus]].max(), 0.0))
    if outside.size:
        res.add("enclosure.plus_outside_gap",
                np.maximum(alpha - outside, outside - beta).min() + 1e-9)
    del inside


def check_annular_apriori(res: SuiteResult, seed, i, n_max, inject=()):
    spec = sc.random_spec(seed, i, Disposition.ANNULAR, n_max, v_ratio=(0.0, 1.0))
    inst = sc.gen_random(spec)
    rep = bd.analyze(inst.A, inst.V, inst.split)
    res.add("annular.gap_le_apriori", rep.bound_apriori + 1e-9 - rep.actual_gap)
    _enclosure_margins(res, rep, inst)
    return rep


def check_annular_trio(res: SuiteResult, seed, i, n_max, inject=()):
    rng = trial_rng(seed, "trio", i)
    base = sc.random_spec(seed, i + (1 << 24), Disposition.ANNULAR, n_max)
    v = float(rng.uniform(0.0, 1.0) * math.sqrt(base.d * (base.gap_len - base.d)))
    inst = sc.gen_random(dataclasses.replace(base, v_norm=v))
    rep = bd.analyze(inst.A, inst.V, inst.split)
    res.add("annular.theta_le_trio", 0.5 * bd._atan(rep.kappa_inf) + 1e-9 - rep.theta_U)
    _enclosure_margins(res, rep, inst)
    return rep


def check_kappa_identity(res: SuiteResult, seed, i, n_max, inject=()):
    rng = trial_rng(seed, "varkappa", i)
    a = float(rng.uniform(0.0, 2.0))
    b = a + float(rng.uniform(0.1, 2.0))
    d = b - a
    v = float(rng.uniform(0.0, 0.999) * math.sqrt(d * (2 * b - d)))
    kp = bd.kappa_piecewise(v, d, 2 * b)
    km, _ = bd.varkappa_min(a, b, v)
    res.add("varkappa.min_equals_piecewise", 1e-6 * max(kp, 1.0) - abs(km - kp))


def _bounds_trial(res, seed, i, n_max, inject):
    check_subordinated(res, seed, i, n_max)
    check_wrong_involution(res, seed, i, n_max)
    check_annular_apriori(res, seed, i, n_max)
    check_annular_trio(res, seed, i, n_max)
    check_kappa_identity(res, seed, i, n_max)


# ---------------------------------------------------------------- numrange

def _numrange_trial(res: SuiteResult, seed, i, n_max, inject):
    rng = trial_rng(seed, "numrange", i)
    n = _dim(rng, n_max)
    T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    B = numrange_boundary(T)
    pts = sample_numrange(T, 500, rng)
    res.add("numrange.hull_sound", 1e-8 * B.scale - B.excess(pts).max())

    # strictly accretive S: sector bound against the boundary sweep and the witness
    H = hermitian_part(T)
    S = T + (1.0 - np.linalg.eigvalsh(H)[0] + rng.uniform(0.1, 2.0)) * np.eye(n)
    sb = sector_bound(S)
    BS = numrange_boundary(S, 1440)
    k_sweep = math.tan(np.abs(np.angle(BS.points)).max())
    res.add("sector.matches_sweep", 1e-4 * max(sb.k, 1e-12) - abs(k_sweep - sb.k))
    z = np.vdot(sb.witness, S @ sb.witness)
    res.add("sector.witness", 1e-6 * max(sb.k, 1e-12) - abs(abs(z.imag) / z.real - sb.k))

    # kappa(mu) equals the sector bound of J(L - mu); compressions stay in the range
    spec = sc.random_spec(seed, i, Disposition.SUBORDINATED, max(n_max, 2))
    inst = sc.gen_random(spec)
    J = involution_from_split(inst.A, inst.split)
    lo, hi = inst.split.sup_minus, inst.split.inf_plus
    mu = float(lo + (hi - lo) * rng.uniform(0.05, 0.95))
    L = inst.A + inst.V
    k = bd.kappa_mu(inst.A, inst.V, J, mu)
    ks = sector_bound(J.J @ (L - mu * np.eye(L.shape[0]))).k
    res.add("kappa_mu.equals_sector_bound", 1e-8 * max(k, 1.0) - abs(k - ks))

    def unit_in(P):
        x = P @ (rng.standard_normal(P.shape[0]) + 1j * rng.standard_normal(P.shape[0]))
        return x / np.linalg.norm(x)

    mu2 = float(rng.uniform(0, 2) * opnorm(L) ** 2)
    T2 = J.J @ (L @ L - mu2 * np.eye(L.shape[0]))
    B2 = numrange_boundary(T2)
    M = pair_compression(inst.A, inst.V, J, mu2, unit_in(J.P_minus), unit_in(J.P_plus))
    res.add("compression.inside_range",
            1e-8 * B2.scale - B2.excess(numrange_boundary(M, 64).points).max())

    # acute iff -1 lies outside W(J'J)
    for acute in (True, False):
        m = _dim(rng, n_max, 2)
        J1, J2 = sc.gen_involution_pair(m, seed, (i << 1) + acute + (1 << 30), acute=acute)
        rep = acute_case(J1, J2)
        outside = float(numrange_boundary(J2.J @ J1.J).excess(-1.0)[0]) > 1e-10
        res.add("acute.numrange_criterion", 0.0 if outside == rep.acute else -1.0)


# --------------------------------------------------------------- scenarios

def check_tsharp(res: SuiteResult, a, b, v1, v2):
    inst = sc.gen_tsharp(sc.TsharpParams(a, b, v1, v2))
    J, Jp = bd.perturbed_involution(inst.A, inst.V, inst.split)
    theta = direct_rotation(J, Jp).theta
    res.add("tsharp.closed_form", 1e-10 - abs(theta - inst.theta_closed_form))


def check_ksharp(res: SuiteResult, coupling: float, N: int, a: float = 0.5, t_max: float = 3.0):
    g = sc.KsharpGrid(a, coupling, N, t_max)
    inst = sc.gen_ksharp(g)
    z = np.linalg.eigvals(inst.Jp.J @ inst.J.J)
    e1, e2 = inst.JJprime_spectrum
    expected = sc.ksharp_spectrum(coupling)
    err = np.minimum(np.abs(z - e1), np.abs(z - e2)).max()
    res.add("ksharp.spectrum", 1e-12 - max(err, abs(e1 - expected[0]), abs(e2 - expected[1])))
    rot = direct_rotation(inst.J, inst.Jp)
    res.add("ksharp.theta", 1e-12 - abs(rot.theta - 0.5 * math.atan(coupling)))
    res.add("ksharp.theta_exact", 1e-12 - abs(inst.theta_exact - 0.5 * math.atan(coupling)))
    res.add("ksharp.kappa_at_zero",
            1e-10 - abs(bd.kappa_mu(inst.A, inst.V, inst.J, 0.0) - coupling))
    kinf, _ = bd.kappa_inf(inst.A, inst.V, inst.split)
    res.add("ksharp.inf_attained_at_zero", 1e-8 * max(coupling, 1.0) - abs(kinf - coupling))
    wrong = direct_rotation(inst.J, -inst.Jp)
    res.add("ksharp.wrong_involution_sharp",
            1e-9 - abs(wrong.theta - bd.lower_bound_wrong_involution(coupling)))
    JJ = inst.Jp.J @ inst.J.J
    res.add("ksharp.reflected_angle",
            1e-9 - abs(spectral_angle(-JJ) - (math.pi - spectral_angle(JJ))))


def _scenarios_trial(res: SuiteResult, seed, i, n_max, inject):
    rng = trial_rng(seed, "scenarios", i)
    a = float(rng.uniform(0.0, 1.0))
    b = a + float(rng.uniform(0.1, 2.0))
    vmax = math.sqrt(b * b - a * a)
    v1, v2 = (rng.dirichlet([1.0, 1.0]) * rng.uniform(0.0, 0.99) * vmax).tolist()
    check_tsharp(res, a, b, v1, v2)
    check_ksharp(res, float(rng.uniform(0.0, 4.0)), _dim(rng, 16), float(rng.uniform(0.0, 1.0)),
                 float(rng.uniform(1.5, 4.0)))

    disp = Disposition.SUBORDINATED if i % 2 == 0 else Disposition.ANNULAR
    spec = sc.random_spec(seed, i, disp, n_max)
    inst, again = sc.gen_random(spec), sc.gen_random(spec)
    same = np.array_equal(inst.A, again.A) and np.array_equal(inst.V, again.V)
    res.add("random.deterministic", 0.0 if same else -1.0)
    J = involution_from_split(inst.A, inst.split)
    res.add("random.anticommutes", 1e-10 * (opnorm(inst.V) + 1) - opnorm(J.J @ inst.V + inst.V @ J.J))
    res.add("random.distance_exact", 1e-12 * max(spec.d, 1.0) - abs(inst.split.d - spec.d))
    res.add("random.norm_exact",
            1e-12 * max(spec.v_norm, 1e-300) - abs(bd.spectral_norm(inst.V) - spec.v_norm))


SUITES: dict[str, Callable] = {
    "rotation": _rotation_trial,
    "relemma": _relemma_trial,
    "bounds": _bounds_trial,
    "numrange": _numrange_trial,
    "scenarios": _scenarios_trial,
}


def run_checks(name: str, trial: Callable, trials: int, seed: int, n_max: int = 16,
               inject: Iterable[str] = ()) -> SuiteResult:
    res = SuiteResult(name)
    inject = frozenset(inject)
    for i in range(trials):
        trial(res, seed, i, n_max, inject)
        res.trials += 1
    return res


def run_suite(name: str, trials: int, seed: int, n_max: int = 16,
              inject: Iterable[str] = ()) -> list[SuiteResult]:
    """Run one suite (or ``"all"``); results are ordered by suite name."""
    names = sorted(SUITES) if name == "all" else [name]
    for nm in names:
        if nm not in SUITES:
            raise KeyError(nm)
    return [run_checks(nm, SUITES[nm], trials, seed, n_max, inject) for nm in names]
