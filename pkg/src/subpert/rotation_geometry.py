"""Acute-case diagnostics, the direct rotation between two involutions,
spectral angles and the projection gap."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from . import config
from .errors import DimensionMismatch, NotAcute, NotAProjection, NotUnitary
from .spectral_core import Involution, as_matrix, hermitian_part, opnorm, polar_decompose


@dataclass(frozen=True)
class AcuteReport:
    smin_IplusJJ: float
    max_diff_action: float
    minus_one_margin: float
    acute: bool


@dataclass(frozen=True, eq=False)
class DirectRotation:
    U: np.ndarray
    theta: float
    operator_angle: np.ndarray


def _pair(J: Involution, Jp: Involution):
    if J.n != Jp.n:
        raise DimensionMismatch(f"involutions of sizes {J.n} and {Jp.n}")
    return J.J, Jp.J


def acute_case(J: Involution, Jp: Involution, tol=None) -> AcuteReport:
    """Acute-case criteria for the pair ``(J, J')``.

    Only ``smin(I + J'J) > acute`` decides; the other two numbers are
    reported for cross-checking (``max_diff_action**2 + smin**2 == 4`` and
    ``minus_one_margin == smin**2 / 2``).
    """
    tol = tol or config.current()
    Jm, Jpm = _pair(J, Jp)
    JJ = Jpm @ Jm
    smin = float(np.linalg.svd(np.eye(J.n) + JJ, compute_uv=False)[-1])
    diff = opnorm(Jpm - Jm)
    margin = 1.0 + float(np.linalg.eigvalsh(hermitian_part(JJ))[0])
    return AcuteReport(smin, diff, margin, smin > tol.acute)


def spectral_angle(W, tol=None) -> float:
    """Largest ``|arg z|`` over the spectrum of the unitary ``W``, arg in (-pi, pi]."""
    tol = tol or config.current()
    W = as_matrix(W)
    if opnorm(W.conj().T @ W - np.eye(W.shape[0])) > tol.unitary:
        raise NotUnitary("spectral angle needs a unitary matrix")
    z = np.linalg.eigvals(W)
    z = z / np.abs(z)
    args = np.angle(z)
    args[args <= -math.pi] = math.pi
    return float(np.abs(args).max())


def direct_rotation(J: Involution, Jp: Involution, tol=None) -> DirectRotation:
    """Unique unitary ``U`` with ``J'U = UJ``, ``U^2 = J'J`` and ``Re U >= 0``.

    Built as the unitary polar factor of ``I + J'J``; raises :class:`NotAcute`
    when that matrix is (numerically) singular.
    """
    tol = tol or config.current()
    report = acute_case(J, Jp, tol)
    if not report.acute:
        raise NotAcute(f"involutions are not in the acute case (smin = {report.smin_IplusJJ:.3e})")
    Jm, Jpm = _pair(J, Jp)
    U = polar_decompose(np.eye(J.n) + Jpm @ Jm, tol).W
    # U is normal, so its Schur form is diagonal; |arg| of the eigenvalues avoids
    # the ill-conditioning of arccos near 1
    R, Z = schur(U, output="complex")
    angle = hermitian_part((Z * np.abs(np.angle(np.diag(R)))) @ Z.conj().T)
    return DirectRotation(U, spectral_angle(U, tol), angle)


def _check_projection(P, tol):
    P = as_matrix(P)
    if opnorm(P - P.conj().T) > tol.projection or opnorm(P @ P - P) > tol.projection:
        raise NotAProjection("expected an orthogonal projection")
    return P


def projection_gap(P, Pp, tol=None) -> float:
    """Spectral norm of ``Pp - P``."""
    tol = tol or config.current()
    P, Pp = _check_projection(P, tol), _check_projection(Pp, tol)
    if P.shape != Pp.shape:
        raise DimensionMismatch(f"shapes {P.shape} and {Pp.shape} differ")
    return opnorm(Pp - P)
