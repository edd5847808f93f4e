"""Numerical range (field of values): boundary sweep, sector bound, the 2x2
elliptical range and two-vector compressions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from . import config
from .errors import (InputError, NonPositiveDiagonal, NotAccretive, NotInSubspace,
                     NotOffDiagonal)
from .spectral_core import (Involution, anticommutes, as_hermitian, as_matrix, hermitian_part,
                            opnorm)


@dataclass(frozen=True, eq=False)
class NumRangeBoundary:
    """Boundary samples ``points[j] = <x_j, T x_j>`` with ``x_j`` the top
    eigenvector of ``Re(exp(-i angles[j]) T)``; ``support[j]`` is the
    corresponding eigenvalue, i.e. the support function of W(T)."""

    points: np.ndarray
    angles: np.ndarray
    support: np.ndarray
    scale: float

    def excess(self, z) -> np.ndarray:
        """Largest violation of the supporting half-planes (<= 0 inside)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        proj = np.real(np.exp(-1j * self.angles)[None, :] * z[:, None])
        return (proj - self.support[None, :]).max(axis=1)

    def contains(self, z, tol=None) -> np.ndarray:
        """Point-in-polygon test against the circumscribed support polygon,
        inflated by ``hull * ||T||``."""
        tol = tol or config.current()
        return self.excess(z) <= tol.hull * self.scale

    def distance_outside(self, z) -> float:
        """Lower bound on the distance from ``z`` to W(T); 0 if ``z`` is inside."""
        return max(float(self.excess(z)[0]), 0.0)


def numrange_boundary(T, m: int = 720) -> NumRangeBoundary:
    if m < 8:
        raise InputError("numrange_boundary needs at least 8 angles")
    T = as_matrix(T)
    angles = 2 * math.pi * np.arange(m) / m
    points = np.empty(m, dtype=complex)
    support = np.empty(m)
    for j, th in enumerate(angles):
        lam, Q = np.linalg.eigh(hermitian_part(np.exp(-1j * th) * T))
        x = Q[:, -1]
        points[j] = np.vdot(x, T @ x)
        support[j] = lam[-1]
    return NumRangeBoundary(points, angles, support, max(opnorm(T), 1e-300))


def sample_numrange(T, count: int, rng) -> np.ndarray:
    """``<y, T y>`` for ``count`` random complex unit vectors ``y``."""
    T = as_matrix(T)
    n = T.shape[0]
    Y = rng.standard_normal((n, count)) + 1j * rng.standard_normal((n, count))
    Y /= np.linalg.norm(Y, axis=0)
    return np.einsum("ij,ij->j", Y.conj(), T @ Y)


@dataclass(frozen=True, eq=False)
class SectorBound:
    k: float
    witness: np.ndarray


def sector_bound(S, tol=None) -> SectorBound:
    """``k(S) = sup |Im z| / Re z`` over the numerical range of accretive ``S``.

    With ``H = Re S`` and ``K = Im S``, the ratio of Rayleigh quotients
    ``|<x,Kx>| / <x,Hx>`` is maximised by the spectral radius of
    ``H^{-1/2} K H^{-1/2}``.  A kernel direction of ``H`` on which ``K``
    acts non-trivially makes ``k`` infinite.
    """
    tol = tol or config.current()
    S = as_matrix(S)
    H = hermitian_part(S)
    K = (S - S.conj().T) / 2j
    lam, Q = np.linalg.eigh(H)
    scale = max(opnorm(S), 1e-300)
    if lam[0] < -tol.accretive * scale:
        raise NotAccretive(f"S is not accretive (lambda_min(Re S) = {lam[0]:.3e})")
    lam_max = max(lam[-1], 0.0)
    pos = lam > tol.pd * lam_max
    if lam_max == 0.0:
        pos[:] = False
    ker = Q[:, ~pos]
    if ker.shape[1] and opnorm(K @ ker) > tol.pd * scale:
        # <x,Kx> != 0 for some x, or K couples the kernel to the range: unbounded ratio
        w = ker[:, np.argmax(np.linalg.norm(K @ ker, axis=0))]
        return SectorBound(math.inf, w)
    if not pos.any():
        return SectorBound(0.0, Q[:, -1])
    Qp = Q[:, pos]
    scal = 1.0 / np.sqrt(lam[pos])
    M = scal[:, None] * (Qp.conj().T @ K @ Qp) * scal[None, :]
    mu, Y = np.linalg.eigh(hermitian_part(M))
    j = int(np.argmax(np.abs(mu)))
    w = Qp @ (scal * Y[:, j])
    return SectorBound(float(abs(mu[j])), w / np.linalg.norm(w))


def ellipse_2x2(alpha: float, beta: float, gamma: complex) -> dict:
    """Sector bound and ellipse data for ``M = [[alpha, -conj(gamma)], [gamma, beta]]``.

    Returns ``k``, the foci (eigenvalues of ``M``) and the full ``axes``
    lengths ``(major, minor)`` of the elliptical numerical range.
    """
    if not (alpha > 0 and beta > 0):
        raise NonPositiveDiagonal("alpha and beta must be positive")
    gamma = complex(gamma)
    M = np.array([[alpha, -gamma.conjugate()], [gamma, beta]], dtype=complex)
    R, _ = schur(M, output="complex")
    foci = np.diag(R)
    scale = max(np.abs(foci).max(), 1e-300)
    foci = foci[np.lexsort((foci.imag, np.round(foci.real / scale, 10)))]  # ties broken by imag
    minor = float(abs(R[0, 1]))  # departure from normality
    major = math.hypot(minor, abs(foci[0] - foci[1]))
    return {"k": abs(gamma) / math.sqrt(alpha * beta), "foci": (complex(foci[0]), complex(foci[1])),
            "axes": (major, minor), "matrix": M}


def pair_compression(A, V, J: Involution, mu: float, e_minus, e_plus, tol=None) -> np.ndarray:
    """2x2 matrix of the form ``t_mu(x, y) = <LJx, Ly> - mu <x, Jy>`` on the
    pair ``(e_-, e_+)``, in the explicit off-diagonal-perturbation form."""
    tol = tol or config.current()
    A, V = as_hermitian(A, tol), as_hermitian(V, tol)
    if not anticommutes(V, J, tol):
        raise NotOffDiagonal("V does not anticommute with J")
    em = np.asarray(e_minus, dtype=complex)
    ep = np.asarray(e_plus, dtype=complex)
    for e, P, name in ((em, J.P_minus, "e_minus"), (ep, J.P_plus, "e_plus")):
        if abs(np.linalg.norm(e) - 1) > tol.projection or np.linalg.norm(P @ e - e) > tol.projection:
            raise NotInSubspace(f"{name} is not a unit vector of the required subspace")
    Am, Ap, Vm, Vp = A @ em, A @ ep, V @ em, V @ ep
    c = np.vdot(Ap, Vm) + np.vdot(Vp, Am)
    return np.array([
        [mu - np.vdot(Am, Am).real - np.vdot(Vm, Vm).real, -np.conj(c)],
        [c, np.vdot(Ap, Ap).real + np.vdot(Vp, Vp).real - mu],
    ])
