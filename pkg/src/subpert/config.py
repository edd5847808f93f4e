"""Numerical tolerances shared by every routine in the package.

A single :class:`Tolerances` record holds all thresholds.  The active record
is initialised from ``SUBSPACE_TOL_<NAME>`` environment variables (e.g.
``SUBSPACE_TOL_ACUTE=1e-9``) and can be swapped temporarily with
:func:`override`.
"""
from __future__ import annotations

import contextlib
import dataclasses
import os
from dataclasses import dataclass

ENV_PREFIX = "SUBSPACE_TOL_"


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12  # relative Frobenius asymmetry
    eig: float = 1e-12
    boundary: float = 1e-10  # relative to ||H||
    classify: float = 1e-9  # relative to spectral diameter
    kernel: float = 1e-10
    rank: float = 1e-10  # relative to sigma_max
    commute: float = 1e-10
    involution: float = 1e-10
    unitary: float = 1e-9
    projection: float = 1e-9
    acute: float = 1e-10
    pd: float = 1e-10  # relative to lambda_max of the Hermitian part
    hull: float = 1e-8  # relative to ||T||
    accretive: float = 1e-10

    def replace(self, **changes: float) -> "Tolerances":
        for name, value in changes.items():
            _check(name, value)
        return dataclasses.replace(self, **changes)


def _check(name: str, value: float) -> None:
    if name not in {f.name for f in dataclasses.fields(Tolerances)}:
        raise KeyError(f"unknown tolerance {name!r}")
    if not 0.0 < value < 1.0:
        raise ValueError(f"tolerance {name}={value} outside (0, 1)")


def from_env(environ=None) -> Tolerances:
    environ = os.environ if environ is None else environ
    changes = {}
    for f in dataclasses.fields(Tolerances):
        raw = environ.get(ENV_PREFIX + f.name.upper())
        if raw is not None:
            changes[f.name] = float(raw)
    return Tolerances().replace(**changes)


_active = from_env()


def current() -> Tolerances:
    return _active


def set_tolerances(tol: Tolerances) -> None:
    global _active
    _active = tol


@contextlib.contextmanager
def override(**changes: float):
    """Temporarily replace some tolerances of the active record."""
    global _active
    saved = _active
    _active = saved.replace(**changes)
    try:
        yield _active
    finally:
        _active = saved
