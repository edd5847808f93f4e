"""Numerical toolkit for rotations of spectral subspaces under off-diagonal
perturbations: involutions, direct rotations, numerical ranges and sharp
a priori bounds."""

__version__ = "0.1.0"
