"""A priori bounds on the rotation of spectral subspaces under off-diagonal
perturbations, and the orchestration that checks them on a concrete
``(A, V, split)`` instance."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import config
from .errors import (ConditionViolated, EnclosureViolated, InputError, KernelNotTrivial,
                     MuOutOfWindow, NegativeKappa, NonPositiveD, NotAcute, NotOffDiagonal,
                     WrongDisposition)
from .rotation_geometry import direct_rotation, projection_gap
from .spectral_core import (Involution, anticommutes, as_hermitian, classification_tol, commutes,
                            eigh, involution_from_eigvecs, opnorm)
from .split import Disposition, SpectralSplit

SQRT_HALF = math.sqrt(0.5)


def _atan(x: float) -> float:
    return math.pi / 2 if math.isinf(x) else math.atan(x)


def spectral_norm(V) -> float:
    """Operator norm of a Hermitian matrix (largest |eigenvalue|)."""
    lam = np.linalg.eigvalsh(as_hermitian(V))
    return float(np.abs(lam).max())


# ---------------------------------------------------------------- kappa(mu)

def kappa_mu(A, V, J: Involution, mu: float, tol=None) -> float:
    """``sup_x |<x, JVx>| / <x, |A - mu| x>``.

    ``JV`` is skew-Hermitian, so the supremum is the spectral norm of
    ``D^{-1/2} JV D^{-1/2}`` with ``D = |A - mu|``.
    """
    tol = tol or config.current()
    A, V = as_hermitian(A, tol), as_hermitian(V, tol)
    if not anticommutes(V, J, tol):
        raise NotOffDiagonal("V does not anticommute with J")
    if not commutes(A, J, tol):
        raise InputError("J does not commute with A")
    lam, Q = eigh(A, tol)
    dist = np.abs(lam - mu)
    if dist.min() <= tol.kernel * max(np.abs(lam).max(), abs(mu), 1.0):
        raise KernelNotTrivial(f"A - mu is singular at mu={mu}")
    Dm = (Q * dist ** -0.5) @ Q.conj().T
    return opnorm(Dm @ (J.J @ V) @ Dm)


class _KappaProfile:
    """Fast ``mu -> kappa(mu)`` for J built from ``split``: in the eigenbasis of A
    only the off-diagonal block of V matters."""

    def __init__(self, A, V, split: SpectralSplit, tol):
        lam, Q = eigh(A, tol)
        mask = split.classify(lam, classification_tol(lam, tol))
        self.J = involution_from_eigvecs(Q, mask)
        if not anticommutes(V, self.J, tol):
            raise NotOffDiagonal("V does not anticommute with J")
        C = Q.conj().T @ V @ Q
        self.block = C[np.ix_(~mask, mask)]
        self.lam_minus, self.lam_plus = lam[mask], lam[~mask]
        self.window = (self.lam_minus.max(), self.lam_plus.min())

    def __call__(self, mu: float) -> float:
        wl = np.abs(self.lam_minus - mu) ** -0.5
        wr = np.abs(self.lam_plus - mu) ** -0.5
        if self.block.size == 0:
            return 0.0
        return float(np.linalg.norm(wr[:, None] * self.block * wl[None, :], 2))


def _grid_min(f, lo: float, hi: float, grid: int, rtol: float = 1e-8):
    """Dense midpoint grid followed by bounded scalar refinement."""
    mus = lo + (hi - lo) * (np.arange(grid) + 0.5) / grid
    vals = np.array([f(m) for m in mus])
    i = int(np.argmin(vals))
    best_mu, best = float(mus[i]), float(vals[i])
    left = mus[i - 1] if i > 0 else lo + 0.5 * (mus[0] - lo)
    right = mus[i + 1] if i < grid - 1 else hi - 0.5 * (hi - mus[-1])
    if best > 0 and right > left:
        res = minimize_scalar(f, bounds=(left, right), method="bounded",
                              options={"xatol": rtol * (hi - lo)})
        if res.fun < best:
            best_mu, best = float(res.x), float(res.fun)
    return best, best_mu


def kappa_inf(A, V, split: SpectralSplit, grid: int = 256, tol=None) -> tuple[float, float]:
    """Minimise ``kappa_mu`` over ``sup sigma_- < mu < inf sigma_+``.

    Returns ``(kappa, mu_star)``.  Every returned value is a valid kappa
    for the tan 2Theta-type bound; suboptimality only loosens it.
    """
    tol = tol or config.current()
    if split.disposition is not Disposition.SUBORDINATED:
        raise WrongDisposition("kappa_inf needs a subordinated split")
    A, V = as_hermitian(A, tol), as_hermitian(V, tol)
    prof = _KappaProfile(A, V, split, tol)
    lo, hi = prof.window
    return _grid_min(prof, lo, hi, grid)


# ---------------------------------------------------------- scalar bounds

def bound_estin(kappa: float) -> float:
    """``sin(arctan(kappa) / 2)`` with ``arctan(inf) = pi/2``."""
    if math.isnan(kappa) or kappa < 0:
        raise NegativeKappa(f"kappa must be >= 0, got {kappa}")
    if math.isinf(kappa):
        return SQRT_HALF
    return math.sin(0.5 * math.atan(kappa))


def _check_vd(norm_V: float, d: float):
    if not d > 0:
        raise NonPositiveD(f"d must be positive, got {d}")
    if not norm_V >= 0:
        raise InputError(f"||V|| must be >= 0, got {norm_V}")


def bound_dk(norm_V: float, d: float) -> float:
    _check_vd(norm_V, d)
    return math.sin(0.5 * math.atan(2 * norm_V / d))


def bound_apriori_tan(norm_V: float, d: float) -> float:
    """``||V|| / sqrt(d^2 + ||V||^2)``, valid for ``||V|| < d``."""
    _check_vd(norm_V, d)
    if not norm_V < d:
        raise ConditionViolated(f"a priori tan bound needs ||V|| < d ({norm_V} >= {d})")
    return norm_V / math.hypot(d, norm_V)


def kappa_piecewise(v: float, d: float, gap_len: float) -> float:
    """Two-branch kappa(v) for ``0 <= v < sqrt(d (|Delta| - d))``."""
    _check_vd(v, d)
    if gap_len < 2 * d:
        raise ConditionViolated(f"gap length {gap_len} < 2d = {2 * d}")
    if not v < math.sqrt(d * (gap_len - d)):
        raise ConditionViolated(f"||V|| = {v} violates ||V||^2 < d(|Delta| - d)")
    half = gap_len / 2
    if v <= math.sqrt(d / 2 * (half - d)):
        return 2 * v / d
    num = v * half + math.sqrt(d * (gap_len - d) * ((half - d) ** 2 + v * v))
    return num / (d * (gap_len - d) - v * v)


def varkappa_mu(a: float, b: float, norm_V: float, mu: float) -> float:
    """Closed-form supremum of the 2x2 sector bounds for the squared, centred
    problem at shift ``mu`` (``a^2 + ||V||^2 < mu < b^2``)."""
    if not 0 <= a < b:
        raise InputError(f"need 0 <= a < b, got a={a}, b={b}")
    if norm_V < 0:
        raise InputError("||V|| must be >= 0")
    v2 = norm_V * norm_V
    if not a * a + v2 < mu < b * b:
        raise MuOutOfWindow(f"mu={mu} outside ({a * a + v2}, {b * b})")
    if a * (b * b - mu) > b * v2:
        return norm_V * (a + b) / math.sqrt((mu - a * a - v2) * (b * b + v2 - mu))
    return math.sqrt(b * b * v2 + a * a * (b * b - mu)) / math.sqrt((mu - a * a - v2) * (b * b - mu))


def varkappa_min(a: float, b: float, norm_V: float, grid: int = 10_000) -> tuple[float, float]:
    """Numerical ``min_mu varkappa_mu``; returns ``(value, mu_star)``."""
    lo, hi = a * a + norm_V ** 2, b * b
    if not lo < hi:
        raise ConditionViolated("empty mu window: ||V||^2 >= b^2 - a^2")
    return _grid_min(lambda m: varkappa_mu(a, b, norm_V, m), lo, hi, grid, rtol=1e-12)


class Enclosure(NamedTuple):
    delta_minus: float
    delta_plus: float
    minus_interval: tuple
    gap: tuple


def delta_enclosure(norm_V: float, split: SpectralSplit) -> Enclosure:
    """Widths by which sigma_- may spread under the perturbation, and the
    resulting enclosure ``[inf sigma_- - delta_-, sup sigma_- + delta_+]``."""
    if split.disposition is not Disposition.ANNULAR:
        raise WrongDisposition("delta enclosure needs an annular split")
    alpha, beta = split.gap
    lo, hi = split.inf_minus, split.sup_minus
    dm = norm_V * math.tan(0.5 * math.atan(2 * norm_V / (beta - lo)))
    dp = norm_V * math.tan(0.5 * math.atan(2 * norm_V / (hi - alpha)))
    if not (dm < lo - alpha and dp < beta - hi):
        raise ConditionViolated("perturbed sigma_- enclosure would leave the gap")
    return Enclosure(dm, dp, (lo - dm, hi + dp), (alpha, beta))


def lower_bound_wrong_involution(kappa_or_k: float) -> float:
    """Minimal spectral angle of the direct rotation to any other admissible involution."""
    if math.isnan(kappa_or_k) or kappa_or_k < 0:
        raise NegativeKappa(f"kappa must be >= 0, got {kappa_or_k}")
    return math.pi / 2 - 0.5 * _atan(kappa_or_k)


# ------------------------------------------------------------------ report

CONDITION_NAMES = ("general_half_d", "offdiag_sqrt3", "apriori_tan", "trio")


@dataclass
class BoundReport:
    disposition: str
    n: int
    norm_V: float
    d: float
    gap_len: Optional[float] = None
    conditions: dict = field(default_factory=dict)
    kappa_inf: Optional[float] = None
    mu_star: Optional[float] = None
    bound_estin: Optional[float] = None
    bound_dk: Optional[float] = None
    bound_apriori: Optional[float] = None
    bound_trio: Optional[float] = None
    delta_minus: Optional[float] = None
    delta_plus: Optional[float] = None
    enclosure_guaranteed: bool = True
    actual_gap: Optional[float] = None
    theta_U: Optional[float] = None
    sharpness_ratio: Optional[float] = None

    BOUND_FIELDS = ("bound_estin", "bound_dk", "bound_apriori", "bound_trio")

    def tightest_bound(self) -> Optional[float]:
        vals = [getattr(self, f) for f in self.BOUND_FIELDS if getattr(self, f) is not None]
        return min(vals) if vals else None

    def to_dict(self) -> dict:
        """Flat mapping; conditions appear as ``condition_<name>`` and +inf as ``"inf"``."""
        out = {}
        for key, value in asdict(self).items():
            if key == "conditions":
                for name in CONDITION_NAMES:
                    out[f"condition_{name}"] = bool(value.get(name, False))
            elif isinstance(value, float) and math.isinf(value):
                out[key] = "inf" if value > 0 else "-inf"
            else:
                out[key] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "BoundReport":
        data = dict(data)
        conditions = {name: data.pop(f"condition_{name}") for name in CONDITION_NAMES}
        for key, value in data.items():
            if value in ("inf", "-inf"):
                data[key] = float(value)
        return cls(conditions=conditions, **data)


def analyze(A, V, split: SpectralSplit, tol=None, grid: int = 256) -> BoundReport:
    """Build ``L = A + V``, split its spectrum by the enclosures the theory
    guarantees, construct the direct rotation and evaluate every applicable
    bound."""
    tol = tol or config.current()
    A, V = as_hermitian(A, tol), as_hermitian(V, tol)
    if A.shape != V.shape:
        raise InputError(f"A and V have shapes {A.shape} and {V.shape}")
    lam, Q = eigh(A, tol)
    ctol = classification_tol(lam, tol)
    minus_mask = split.classify(lam, ctol)
    J = involution_from_eigvecs(Q, minus_mask)
    if not anticommutes(V, J, tol):
        raise NotOffDiagonal("V does not anticommute with J = E_A(sigma_+) - E_A(sigma_-)")
    geo = SpectralSplit.from_eigenvalues(lam[minus_mask], lam[~minus_mask], split.disposition)

    nv = spectral_norm(V)
    d = geo.d
    annular = geo.disposition is Disposition.ANNULAR
    gap_len = geo.gap_len if annular else None
    conditions = {
        "general_half_d": nv < d / 2,
        "offdiag_sqrt3": nv < math.sqrt(3) / 2 * d,
        "apriori_tan": nv < d,
        "trio": bool(annular and nv < math.sqrt(d * (gap_len - d))),
    }
    report = BoundReport(geo.disposition.value, A.shape[0], nv, d, gap_len, conditions)

    L = A + V
    mu_vals, QL = eigh(L, tol)
    ltol = classification_tol(mu_vals, tol)
    if not annular:
        report.kappa_inf, report.mu_star = kappa_inf(A, V, geo, grid=grid, tol=tol)
        report.bound_estin = bound_estin(report.kappa_inf)
        report.bound_dk = bound_dk(nv, d)
        lm, lp = geo.sup_minus, geo.inf_plus
        pminus = mu_vals <= lm + ltol
        pplus = mu_vals >= lp - ltol
    else:
        alpha, beta = geo.gap
        guaranteed = nv < math.sqrt(2) * d or conditions["trio"]
        enclosure = None
        try:
            enclosure = delta_enclosure(nv, geo)
        except ConditionViolated:
            if guaranteed:
                raise
        if enclosure is not None:
            report.delta_minus, report.delta_plus = enclosure.delta_minus, enclosure.delta_plus
        if conditions["apriori_tan"]:
            report.bound_apriori = bound_apriori_tan(nv, d)
        if conditions["trio"]:
            report.kappa_inf = kappa_piecewise(nv, d, gap_len)
            _, report.mu_star = varkappa_min(geo.a, geo.b, nv, grid=2000)
            report.bound_trio = bound_estin(report.kappa_inf)
        report.enclosure_guaranteed = bool(guaranteed and enclosure is not None)
        pplus = (mu_vals <= alpha + ltol) | (mu_vals >= beta - ltol)
        if report.enclosure_guaranteed:
            lo, hi = enclosure.minus_interval
            pminus = (mu_vals >= lo - ltol) & (mu_vals <= hi + ltol)
        else:
            pminus = ~pplus

    bad = pminus == pplus
    if report.enclosure_guaranteed and bad.any():
        raise EnclosureViolated(
            f"eigenvalues {mu_vals[bad].tolist()} of L fall outside the guaranteed enclosures")
    if bad.any() or pminus.sum() != minus_mask.sum():
        return report  # spectrum of L cannot be split consistently; no rotation

    Jp = involution_from_eigvecs(QL, pminus)
    try:
        rot = direct_rotation(J, Jp, tol)
    except NotAcute:
        if report.enclosure_guaranteed:
            raise
        return report
    report.theta_U = rot.theta
    report.actual_gap = projection_gap(J.P_minus, Jp.P_minus, tol)
    tight = report.tightest_bound()
    if tight is not None:
        if tight > 0:
            report.sharpness_ratio = report.actual_gap / tight
        else:
            report.sharpness_ratio = 0.0 if report.actual_gap <= ltol else math.inf
    return report


def perturbed_involution(A, V, split: SpectralSplit, tol=None) -> tuple[Involution, Involution]:
    """``(J, J')`` for an instance, using the same classification as :func:`analyze`."""
    tol = tol or config.current()
    A, V = as_hermitian(A, tol), as_hermitian(V, tol)
    lam, Q = eigh(A, tol)
    minus_mask = split.classify(lam, classification_tol(lam, tol))
    J = involution_from_eigvecs(Q, minus_mask)
    mu_vals, QL = eigh(A + V, tol)
    k = int(minus_mask.sum())
    geo = SpectralSplit.from_eigenvalues(lam[minus_mask], lam[~minus_mask], split.disposition)
    if geo.disposition is Disposition.SUBORDINATED:
        pminus = np.arange(len(mu_vals)) < k
    else:
        # count-based, like the subordinated case: a gap test misclassifies
        # eigenvalues whose outward shift is below rounding
        order = np.argsort(np.abs(mu_vals - geo.center), kind="stable")
        pminus = np.zeros(len(mu_vals), dtype=bool)
        pminus[order[:k]] = True
    return J, involution_from_eigvecs(QL, pminus)
