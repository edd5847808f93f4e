"""Dense Hermitian eigen-machinery: spectral projections, involutions,
polar decomposition and accretivity diagnostics.

Matrices are plain complex ``numpy`` arrays.  Inner products are linear in
the second argument, ``<x, y> = x^H y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import config
from .errors import (DimensionMismatch, EigenvalueOnBoundary, InputError, KernelNotTrivial,
                     NonHermitianInput, NotAnInvolution)
from .split import SpectralSplit


def as_matrix(T) -> np.ndarray:
    """Validate a square finite matrix and return it as complex128."""
    M = np.asarray(T, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.isfinite(M).all():
        raise InputError("matrix has non-finite entries")
    return M


def as_hermitian(H, tol=None) -> np.ndarray:
    """Check ``||H - H^H||_F <= tol * ||H||_F`` and return the symmetrised matrix."""
    tol = tol or config.current()
    M = as_matrix(H)
    asym = np.linalg.norm(M - M.conj().T)
    if asym > tol.hermitian * np.linalg.norm(M):
        raise NonHermitianInput(f"matrix is not Hermitian (||H - H^H||_F = {asym:.3e})")
    return 0.5 * (M + M.conj().T)


def opnorm(M) -> float:
    return float(np.linalg.norm(M, 2))


def hermitian_part(S) -> np.ndarray:
    return 0.5 * (S + S.conj().T)


def _fix_phases(Q: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column real positive."""
    idx = np.argmax(np.abs(Q), axis=0)
    lead = Q[idx, np.arange(Q.shape[1])]
    return Q * (np.abs(lead) / lead)[None, :]


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.conj().T


def eigh(H, tol=None) -> EigenSystem:
    """Eigen-decomposition with ascending eigenvalues and a deterministic
    eigenvector phase."""
    M = as_hermitian(H, tol)
    lam, Q = np.linalg.eigh(M)
    return EigenSystem(lam, _fix_phases(Q))


class Interval(NamedTuple):
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, False, False)

    def contains(self, x: float) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below


def _projector(Q: np.ndarray, mask: np.ndarray) -> np.ndarray:
    Qs = Q[:, mask]
    return Qs @ Qs.conj().T


def spectral_projection(H, interval: Interval, tol=None) -> np.ndarray:
    """Orthogonal projection onto the span of eigenvectors whose eigenvalues
    lie in ``interval``.

    Eigenvalues within ``boundary * ||H||`` of an open endpoint make the
    split ill-posed and raise :class:`EigenvalueOnBoundary`; at a closed
    endpoint they are counted as inside.
    """
    tol = tol or config.current()
    lam, Q = eigh(H, tol)
    iv = Interval(*interval)
    eps = tol.boundary * max(np.abs(lam).max(), 1e-300)
    mask = np.zeros(lam.shape, dtype=bool)
    for i, x in enumerate(lam):
        for end, closed in ((iv.lo, iv.lo_closed), (iv.hi, iv.hi_closed)):
            if math.isfinite(end) and abs(x - end) <= eps:
                if not closed:
                    raise EigenvalueOnBoundary(f"eigenvalue {x} at open endpoint {end}")
                mask[i] = True
        mask[i] |= iv.contains(x)
    return _projector(Q, mask)


@dataclass(frozen=True, eq=False)
class Involution:
    """Self-adjoint unitary ``J`` with spectral projections ``P_plus`` and
    ``P_minus = (I - J) / 2``."""

    J: np.ndarray
    P_plus: np.ndarray
    P_minus: np.ndarray

    @classmethod
    def from_minus_projection(cls, P_minus) -> "Involution":
        P_minus = hermitian_part(np.asarray(P_minus, dtype=complex))
        eye = np.eye(P_minus.shape[0])
        P_plus = eye - P_minus
        inv = cls(P_plus - P_minus, P_plus, P_minus)
        inv.check()
        return inv

    @classmethod
    def from_matrix(cls, J, tol=None) -> "Involution":
        J = as_matrix(J)
        eye = np.eye(J.shape[0])
        inv = cls(J, 0.5 * (eye + J), 0.5 * (eye - J))
        inv.check(tol)
        return inv

    @property
    def n(self) -> int:
        return self.J.shape[0]

    def check(self, tol=None) -> None:
        tol = tol or config.current()
        J = self.J
        if opnorm(J - J.conj().T) > tol.involution or opnorm(J @ J - np.eye(self.n)) > tol.involution:
            raise NotAnInvolution("J must satisfy J^H = J and J^2 = I")

    def __neg__(self) -> "Involution":
        return Involution(-self.J, self.P_minus, self.P_plus)


def involution_from_eigvecs(Q: np.ndarray, minus_mask: np.ndarray) -> Involution:
    return Involution.from_minus_projection(_projector(Q, minus_mask))


def classification_tol(eigenvalues, tol=None) -> float:
    tol = tol or config.current()
    lam = np.asarray(eigenvalues)
    scale = max(lam.max() - lam.min(), np.abs(lam).max(), 1e-300)
    return tol.classify * scale


def involution_from_split(A, split: SpectralSplit, tol=None) -> Involution:
    """``J = E_A(sigma_+) - E_A(sigma_-)``."""
    lam, Q = eigh(A, tol)
    mask = split.classify(lam, classification_tol(lam, tol))
    return involution_from_eigvecs(Q, mask)


def sign_involution(T, mu: float, tol=None) -> Involution:
    """``E_T((mu, inf)) - E_T((-inf, mu))``; the unitary polar factor of ``T - mu``."""
    tol = tol or config.current()
    lam, Q = eigh(T, tol)
    scale = max(np.abs(lam).max(), abs(mu), 1.0)
    gap = np.abs(lam - mu).min()
    if gap <= tol.kernel * scale:
        raise KernelNotTrivial(f"T - mu is singular (min |lambda - mu| = {gap:.3e})")
    return involution_from_eigvecs(Q, lam < mu)


class PolarParts(NamedTuple):
    W: np.ndarray
    absT: np.ndarray
    kernel_dim: int


def polar_decompose(T, tol=None) -> PolarParts:
    """``T = W |T|`` with ``W`` extended by zero on the numerical kernel of ``T``.

    Singular values below ``rank * sigma_max`` are treated as zero.
    """
    tol = tol or config.current()
    T = as_matrix(T)
    X, s, Yh = np.linalg.svd(T)
    keep = s > tol.rank * s[0] if s[0] > 0 else np.zeros(s.shape, dtype=bool)
    Y = Yh.conj().T
    absT = (Y * s) @ Yh
    absT = hermitian_part(absT)
    W = X[:, keep] @ Yh[keep, :]
    return PolarParts(W, absT, int((~keep).sum()))


def _same_shape(V, J):
    V = as_matrix(V)
    Jm = J.J if isinstance(J, Involution) else as_matrix(J)
    if V.shape != Jm.shape:
        raise DimensionMismatch(f"shapes {V.shape} and {Jm.shape} differ")
    return V, Jm


def anticommutes(V, J, tol=None) -> bool:
    tol = tol or config.current()
    V, Jm = _same_shape(V, J)
    return opnorm(Jm @ V + V @ Jm) <= tol.commute * (opnorm(V) + 1.0)


def commutes(V, J, tol=None) -> bool:
    tol = tol or config.current()
    V, Jm = _same_shape(V, J)
    return opnorm(Jm @ V - V @ Jm) <= tol.commute * (opnorm(V) + 1.0)


def accretivity_margin(S) -> float:
    """Smallest eigenvalue of the Hermitian part; >= 0 iff ``S`` is accretive."""
    S = as_matrix(S)
    return float(np.linalg.eigvalsh(hermitian_part(S))[0])
