"""Disposition of a spectrum into two parts and the geometry derived from it."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, UnclassifiedEigenvalue, WrongDisposition


class Disposition(str, enum.Enum):
    SUBORDINATED = "subordinated"  # sup sigma_- < inf sigma_+
    ANNULAR = "annular"  # sigma_- inside a finite gap of sigma_+


def _interval_dist(p, q) -> float:
    if p[1] < q[0]:
        return q[0] - p[1]
    if q[1] < p[0]:
        return p[0] - q[1]
    return 0.0


def _as_intervals(raw: Iterable[Sequence[float]]) -> tuple:
    out = []
    for item in raw:
        lo, hi = (float(v) for v in item)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise InputError(f"bad interval [{lo}, {hi}]")
        out.append((lo, hi))
    if not out:
        raise InputError("empty spectral set")
    return tuple(sorted(out))


@dataclass(frozen=True)
class SpectralSplit:
    """Two closed sets sigma_minus / sigma_plus, each a union of closed intervals.

    For the annular disposition all geometry is also exposed in the centred
    frame where the gap is ``(-b, b)`` and ``sigma_minus`` lies in ``[-a, a]``.
    """

    disposition: Disposition
    sigma_minus: tuple
    sigma_plus: tuple

    def __post_init__(self):
        object.__setattr__(self, "disposition", Disposition(self.disposition))
        object.__setattr__(self, "sigma_minus", _as_intervals(self.sigma_minus))
        object.__setattr__(self, "sigma_plus", _as_intervals(self.sigma_plus))
        if not self.d > 0:
            raise InputError(f"sigma_minus and sigma_plus are not separated (d={self.d})")
        if self.disposition is Disposition.SUBORDINATED:
            if not self.sup_minus < self.inf_plus:
                raise InputError("subordinated split requires sup sigma_- < inf sigma_+")
        else:
            lo, hi = self.inf_minus, self.sup_minus
            if any(p[1] >= lo and p[0] <= hi for p in self.sigma_plus):
                raise InputError("sigma_+ intersects the convex hull of sigma_-")
            below = [p for p in self.sigma_plus if p[1] < lo]
            above = [p for p in self.sigma_plus if p[0] > hi]
            if not below or not above:
                raise InputError("annular split needs sigma_+ on both sides of sigma_-")
            if not (math.isfinite(self.gap[0]) and math.isfinite(self.gap[1])):
                raise InputError("gap of sigma_+ must be finite")

    # basic extents
    @property
    def inf_minus(self) -> float:
        return self.sigma_minus[0][0]

    @property
    def sup_minus(self) -> float:
        return max(p[1] for p in self.sigma_minus)

    @property
    def inf_plus(self) -> float:
        return self.sigma_plus[0][0]

    @property
    def sup_plus(self) -> float:
        return max(p[1] for p in self.sigma_plus)

    @property
    def d(self) -> float:
        return min(_interval_dist(p, q) for p in self.sigma_minus for q in self.sigma_plus)

    # annular geometry
    def _require_annular(self):
        if self.disposition is not Disposition.ANNULAR:
            raise WrongDisposition("gap geometry is only defined for the annular disposition")

    @property
    def gap(self) -> tuple[float, float]:
        """The finite gap (alpha, beta) of sigma_+ containing sigma_-."""
        self._require_annular()
        alpha = max(p[1] for p in self.sigma_plus if p[1] < self.inf_minus)
        beta = min(p[0] for p in self.sigma_plus if p[0] > self.sup_minus)
        return alpha, beta

    @property
    def gap_len(self) -> float:
        alpha, beta = self.gap
        return beta - alpha

    @property
    def center(self) -> float:
        alpha, beta = self.gap
        return 0.5 * (alpha + beta)

    @property
    def b(self) -> float:
        return 0.5 * self.gap_len

    @property
    def a(self) -> float:
        return self.b - self.d

    def mu_window(self, norm_V: float = 0.0) -> tuple[float, float]:
        """Admissible shifts.  Subordinated: ``(sup sigma_-, inf sigma_+)``.
        Annular: ``(a^2 + ||V||^2, b^2)`` for the squared, centred operator."""
        if self.disposition is Disposition.SUBORDINATED:
            return self.sup_minus, self.inf_plus
        return self.a**2 + norm_V**2, self.b**2

    # classification
    def classify(self, eigenvalues, tol: float) -> np.ndarray:
        """Boolean mask: True where an eigenvalue belongs to sigma_minus."""
        lam = np.asarray(eigenvalues, dtype=float)

        def near(intervals):
            hit = np.zeros(lam.shape, dtype=bool)
            for lo, hi in intervals:
                hit |= (lam >= lo - tol) & (lam <= hi + tol)
            return hit

        minus, plus = near(self.sigma_minus), near(self.sigma_plus)
        bad = minus == plus
        if bad.any():
            raise UnclassifiedEigenvalue(
                f"eigenvalue(s) {lam[bad].tolist()} not assigned to exactly one spectral set")
        return minus

    @classmethod
    def from_eigenvalues(cls, minus_vals, plus_vals, disposition) -> "SpectralSplit":
        """Tightest split whose sets are hulls of the given eigenvalue groups."""
        lm = np.sort(np.asarray(minus_vals, dtype=float))
        lp = np.sort(np.asarray(plus_vals, dtype=float))
        if lm.size == 0 or lp.size == 0:
            raise InputError("both spectral sets must be non-empty")
        minus = [(lm[0], lm[-1])]
        if Disposition(disposition) is Disposition.SUBORDINATED:
            plus = [(lp[0], lp[-1])]
        else:
            low, high = lp[lp < lm[0]], lp[lp > lm[-1]]
            if low.size + high.size != lp.size:
                raise InputError("sigma_+ intersects the convex hull of sigma_-")
            plus = [(s[0], s[-1]) for s in (low, high) if s.size]
        return cls(disposition, minus, plus)

    def refined(self, eigenvalues, tol: float) -> "SpectralSplit":
        lam = np.asarray(eigenvalues, dtype=float)
        mask = self.classify(lam, tol)
        return SpectralSplit.from_eigenvalues(lam[mask], lam[~mask], self.disposition)

    # serialisation
    def to_dict(self) -> dict:
        enc = lambda x: x if math.isfinite(x) else ("inf" if x > 0 else "-inf")
        return {
            "disposition": self.disposition.value,
            "sigma_minus": [[enc(lo), enc(hi)] for lo, hi in self.sigma_minus],
            "sigma_plus": [[enc(lo), enc(hi)] for lo, hi in self.sigma_plus],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralSplit":
        try:
            disposition = Disposition(data["disposition"])
        except KeyError as exc:
            raise InputError(f"split descriptor missing field {exc}") from None
        except ValueError:
            raise InputError(f"split descriptor field 'disposition': unknown value "
                             f"{data['disposition']!r}") from None
        for key in ("sigma_minus", "sigma_plus"):
            if key not in data:
                raise InputError(f"split descriptor missing field '{key}'")
            raw = data[key]
            if not isinstance(raw, list) or not all(
                    isinstance(p, list) and len(p) == 2 for p in raw):
                raise InputError(f"split descriptor field '{key}' must be a list of [lo, hi] pairs")
        try:
            return cls(disposition, data["sigma_minus"], data["sigma_plus"])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"split descriptor: {exc}") from None
