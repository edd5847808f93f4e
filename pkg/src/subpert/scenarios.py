"""Instance generators: the two sharpness families, random instances with a
prescribed spectral disposition, and inputs for the polar-factor transfer
property.

Randomness is always derived from ``(seed, index)`` through
:func:`stream`, so instances can be generated in any order or in parallel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar
from scipy.stats import unitary_group

from . import config
from .bounds import kappa_mu
from .errors import (ConditionViolated, ConstructionFailed, GridViolatesCutoff, InfeasibleSpec,
                     InputError)
from .rotation_geometry import acute_case
from .spectral_core import (Involution, accretivity_margin, hermitian_part, involution_from_split,
                            sign_involution)
from .split import Disposition, SpectralSplit

SEED_MASK = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for instance ``index`` of run ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed & SEED_MASK, index]))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.exp(2j * math.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return hermitian_part(X)


# ----------------------------------------------------- 4x4 sharpness family

@dataclass(frozen=True)
class TsharpParams:
    a: float
    b: float
    v1: float
    v2: float

    @property
    def norm_V(self) -> float:
        return self.v1 + self.v2


@dataclass(frozen=True, eq=False)
class TsharpInstance:
    A: np.ndarray
    V: np.ndarray
    J: Involution
    split: SpectralSplit
    theta_closed_form: float


def tsharp_theta(a: float, b: float, v1: float, v2: float) -> float:
    """Closed-form rotation angle of the 4x4 family."""
    nv, s = v1 + v2, v1 - v2
    return 0.5 * math.atan2(2 * a * s + 2 * b * nv, b * b - a * a - nv * nv + s * s)


def _check_tsharp(a, b, nv):
    if not 0 <= a < b:
        raise InputError(f"need 0 <= a < b, got a={a}, b={b}")
    if not nv * nv < b * b - a * a:
        raise ConditionViolated(f"||V||^2 = {nv * nv} must be < b^2 - a^2 = {b * b - a * a}")


def gen_tsharp(p: TsharpParams) -> TsharpInstance:
    if p.v1 < 0 or p.v2 < 0:
        raise InputError("v1 and v2 must be non-negative")
    _check_tsharp(p.a, p.b, p.norm_V)
    a, b, v1, v2 = p.a, p.b, p.v1, p.v2
    A = np.diag([-b, -a, a, b]).astype(complex)
    V = np.array([[0, v1, v2, 0],
                  [v1, 0, 0, v2],
                  [v2, 0, 0, v1],
                  [0, v2, v1, 0]], dtype=complex)
    split = SpectralSplit("annular", [[-a, a]], [[-b, -b], [b, b]])
    J = involution_from_split(A, split)
    return TsharpInstance(A, V, J, split, tsharp_theta(a, b, v1, v2))


def tsharp_maximizer(a: float, b: float, v_norm: float, grid: int = 2001) -> tuple[float, float]:
    """Maximise the closed-form angle over ``v1 - v2`` in ``[-v, v]`` at fixed
    ``||V|| = v``; returns ``(theta_max, v1 - v2)``."""
    _check_tsharp(a, b, v_norm)
    if v_norm == 0:
        return 0.0, 0.0
    f = lambda s: tsharp_theta(a, b, (v_norm + s) / 2, (v_norm - s) / 2)
    s_grid = np.linspace(-v_norm, v_norm, grid)
    vals = np.array([f(s) for s in s_grid])
    i = int(np.argmax(vals))
    best, s_best = float(vals[i]), float(s_grid[i])
    lo, hi = s_grid[max(i - 1, 0)], s_grid[min(i + 1, grid - 1)]
    res = minimize_scalar(lambda s: -f(s), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * max(v_norm, 1.0)})
    if -res.fun > best:
        best, s_best = float(-res.fun), float(res.x)
    return best, s_best


def tsharp_max_theta(a: float, b: float, v_norm: float, grid: int = 2001) -> float:
    return tsharp_maximizer(a, b, v_norm, grid)[0]


# --------------------------------------------- discretised parity example

@dataclass(frozen=True)
class KsharpGrid:
    a: float
    coupling: float
    N: int
    t_max: float

    def nodes(self) -> np.ndarray:
        """Positive nodes ``a + (t_max - a) i / N``, ``i = 1..N``."""
        return self.a + (self.t_max - self.a) * np.arange(1, self.N + 1) / self.N


@dataclass(frozen=True, eq=False)
class KsharpInstance:
    A: np.ndarray
    V: np.ndarray
    J: Involution
    Jp: Involution
    split: SpectralSplit
    theta_exact: float
    JJprime_spectrum: tuple


def ksharp_spectrum(coupling: float) -> tuple[complex, complex]:
    r = math.sqrt(1 + coupling * coupling)
    return complex(1, -coupling) / r, complex(1, coupling) / r


def gen_ksharp(g: KsharpGrid, check_tol: float = 1e-10) -> KsharpInstance:
    """Pairwise-exact model on nodes ``{+-t_i}``: ``A`` acts as ``|t|`` times
    parity, ``V`` multiplies by ``coupling * t`` and ``J`` is the parity."""
    if g.N < 1 or g.a < 0 or not g.t_max > g.a or g.coupling < 0:
        raise GridViolatesCutoff(f"invalid grid {g}")
    t = g.nodes()
    N = g.N
    A = np.zeros((2 * N, 2 * N), dtype=complex)
    idx = np.arange(N)
    A[idx, N + idx] = t
    A[N + idx, idx] = t
    V = np.diag(np.concatenate([g.coupling * t, -g.coupling * t])).astype(complex)
    split = SpectralSplit("subordinated", [[-t[-1], -t[0]]], [[t[0], t[-1]]])
    J = involution_from_split(A, split)
    Jp = sign_involution(A + V, 0.0)
    expected = ksharp_spectrum(g.coupling)
    z = np.linalg.eigvals(Jp.J @ J.J)
    err = np.minimum(np.abs(z - expected[0]), np.abs(z - expected[1])).max()
    if err > check_tol:
        raise ConstructionFailed(f"spectrum of J'J deviates by {err:.3e}")
    return KsharpInstance(A, V, J, Jp, split, 0.5 * math.atan(g.coupling), expected)


# ------------------------------------------------------ random instances

@dataclass(frozen=True)
class RandomSpec:
    n_minus: int
    n_plus: int
    disposition: Disposition
    d: float
    gap_len: Optional[float] = None
    spectrum_spread: float = 1.0
    v_norm: float = 0.0
    seed: int = 0
    index: int = 0


@dataclass(frozen=True, eq=False)
class RandomInstance:
    A: np.ndarray
    V: np.ndarray
    split: SpectralSplit


def _eigenvalues(spec: RandomSpec, rng) -> tuple[np.ndarray, np.ndarray]:
    d, w = spec.d, spec.spectrum_spread
    c = w * rng.uniform(-1, 1)
    if Disposition(spec.disposition) is Disposition.SUBORDINATED:
        lm = c - w * rng.random(spec.n_minus)
        lp = c + d + w * rng.random(spec.n_plus)
        lm[0], lp[0] = c, c + d  # realise the distance d exactly
        return lm, lp
    g = spec.gap_len
    if g is None or g < 2 * d:
        raise InfeasibleSpec(f"annular disposition needs gap_len >= 2d (gap_len={g}, d={d})")
    if spec.n_plus < 2:
        raise InfeasibleSpec("annular disposition needs n_plus >= 2")
    a = g / 2 - d
    lm = c + a * rng.uniform(-1, 1, spec.n_minus)
    lm[0] = c + a * rng.choice([-1.0, 1.0])
    side = rng.choice([-1.0, 1.0], spec.n_plus)
    lp = c + side * (g / 2 + w * rng.random(spec.n_plus))
    lp[0], lp[1] = c - g / 2, c + g / 2
    return lm, lp


def gen_random(spec: RandomSpec) -> RandomInstance:
    if spec.n_minus < 1 or spec.n_plus < 1:
        raise InfeasibleSpec("both spectral sets need at least one eigenvalue")
    if not spec.d > 0 or spec.v_norm < 0 or spec.spectrum_spread < 0:
        raise InfeasibleSpec(f"invalid spec {spec}")
    rng = stream(spec.seed, spec.index)
    lm, lp = _eigenvalues(spec, rng)
    nm, n = spec.n_minus, spec.n_minus + spec.n_plus
    Q = random_unitary(n, rng)
    A = hermitian_part((Q * np.concatenate([lm, lp])) @ Q.conj().T)
    B = rng.standard_normal((spec.n_plus, nm)) + 1j * rng.standard_normal((spec.n_plus, nm))
    if spec.v_norm == 0:
        V = np.zeros((n, n), dtype=complex)
    else:
        B *= spec.v_norm / np.linalg.norm(B, 2)
        blk = np.zeros((n, n), dtype=complex)
        blk[nm:, :nm] = B
        blk[:nm, nm:] = B.conj().T
        V = hermitian_part(Q @ blk @ Q.conj().T)
    split = SpectralSplit.from_eigenvalues(lm, lp, spec.disposition)
    return RandomInstance(A, V, split)


def random_spec(seed: int, index: int, disposition, n_max: int = 64,
                v_ratio: tuple = (0.0, 2.0), gap_ratio: tuple = (2.0, 5.0)) -> RandomSpec:
    """Draw dimensions, d, gap length and ||V|| (as a multiple of d) for one
    instance of a random suite."""
    rng = stream(seed, index + (1 << 32))
    disposition = Disposition(disposition)
    n = int(rng.integers(2 if disposition is Disposition.SUBORDINATED else 3, n_max + 1))
    lo_plus = 1 if disposition is Disposition.SUBORDINATED else 2
    n_minus = int(rng.integers(1, n - lo_plus + 1))
    d = float(rng.uniform(0.1, 2.0))
    gap = float(d * rng.uniform(*gap_ratio)) if disposition is Disposition.ANNULAR else None
    v = float(d * rng.uniform(*v_ratio))
    return RandomSpec(n_minus, n - n_minus, disposition, d, gap, float(rng.uniform(0.1, 3.0)), v,
                      seed, index)


# ------------------------------------------------ polar-factor transfer pairs

@dataclass(frozen=True, eq=False)
class RelemmaInstance:
    G: np.ndarray
    T: np.ndarray
    J: Involution
    mu: float
    kappa: float


def gen_relemma_instance(n: int, seed: int, index: int = 0, retries: int = 8) -> RelemmaInstance:
    """``T = L - mu`` and ``G = exp(i phi) J`` with ``phi = pi/2 - arctan kappa(mu)``
    from a random subordinated instance; both ``GT`` and ``G^H T^H`` are accretive."""
    if n < 2:
        raise InputError("n must be >= 2")
    tol = config.current()
    for attempt in range(retries):
        rng = stream(seed, (index << 8) + attempt)
        n_minus = int(rng.integers(1, n))
        d = float(rng.uniform(0.1, 2.0))
        spec = RandomSpec(n_minus, n - n_minus, Disposition.SUBORDINATED, d,
                          spectrum_spread=float(rng.uniform(0.1, 3.0)),
                          v_norm=float(d * rng.uniform(0.0, 3.0)),
                          seed=seed, index=(index << 8) + attempt + (1 << 40))
        inst = gen_random(spec)
        J = involution_from_split(inst.A, inst.split)
        lo, hi = inst.split.sup_minus, inst.split.inf_plus
        mu = float(lo + (hi - lo) * rng.uniform(0.1, 0.9))
        kappa = kappa_mu(inst.A, inst.V, J, mu)
        phi = math.pi / 2 - math.atan(kappa)
        T = inst.A + inst.V - mu * np.eye(n)
        G = np.exp(1j * phi) * J.J
        scale = np.linalg.norm(T, 2) * tol.accretive
        if (accretivity_margin(G @ T) >= -scale
                and accretivity_margin(G.conj().T @ T.conj().T) >= -scale):
            return RelemmaInstance(G, T, J, mu, kappa)
    raise ConstructionFailed(f"no accretive pair after {retries} attempts")


# -------------------------------------------------------- involution pairs

def random_involution(n: int, rng, n_minus: Optional[int] = None) -> Involution:
    k = int(rng.integers(0, n + 1)) if n_minus is None else n_minus
    Q = random_unitary(n, rng)
    Qm = Q[:, :k]
    return Involution.from_minus_projection(Qm @ Qm.conj().T)


def gen_involution_pair(n: int, seed: int, index: int = 0, acute: bool = True,
                        min_smin: float = 1e-3, retries: int = 50) -> tuple[Involution, Involution]:
    """Random pair ``(J, J')``.  Acute pairs come from rotating ``J`` by
    ``exp(iH)``; non-acute pairs put a vector of Ran P_- into Ran P'_+."""
    for attempt in range(retries):
        rng = stream(seed, (index << 8) + attempt)
        if not acute:
            if n < 2:
                raise InputError("a non-acute pair needs n >= 2")
            J = random_involution(n, rng, int(rng.integers(1, n)))
            Qm = np.linalg.svd(J.P_minus)[0][:, :1]  # unit vector in Ran P_-
            rest = random_unitary(n, rng)[:, : int(rng.integers(0, n))]
            basis = np.linalg.qr(np.hstack([Qm, rest]))[0]
            Pp = basis @ basis.conj().T
            return J, Involution.from_minus_projection(np.eye(n) - Pp)
        J = random_involution(n, rng)
        H = random_hermitian(n, rng)
        H *= rng.uniform(0.05, 1.5) / np.linalg.norm(H, 2)
        W = expm(1j * H)
        Jp = Involution.from_minus_projection(W @ J.P_minus @ W.conj().T)
        if acute_case(J, Jp).smin_IplusJJ > min_smin:
            return J, Jp
    raise ConstructionFailed("could not draw an acute pair")
