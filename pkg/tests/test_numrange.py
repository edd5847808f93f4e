import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subpert.errors import (InputError, NonPositiveDiagonal, NotAccretive, NotInSubspace,
                            NotOffDiagonal)
from subpert.numrange import (ellipse_2x2, numrange_boundary, pair_compression, sample_numrange,
                              sector_bound)
from subpert.scenarios import TsharpParams, gen_tsharp
from subpert.spectral_core import Involution

from conftest import offdiag


def test_boundary_hermitian_is_segment():
    B = numrange_boundary(np.diag([0.0, 1.0]), 64)
    assert np.allclose(B.points.imag, 0, atol=1e-12)
    assert B.points.real.min() >= -1e-12 and B.points.real.max() <= 1 + 1e-12


def test_boundary_jordan_block_circle(rng):
    T = np.array([[0, 1], [0, 0]], dtype=complex)
    B = numrange_boundary(T)
    assert np.allclose(np.abs(B.points), 0.5, atol=1e-9)
    assert np.abs(sample_numrange(T, 2000, rng)).max() <= 0.5 + 1e-12


def test_boundary_normal_is_segment():
    B = numrange_boundary(np.diag([1.0, 1j]))
    # every boundary point lies on the segment from 1 to i
    assert np.allclose(B.points.real + B.points.imag, 1, atol=1e-12)
    assert B.contains(0.5 + 0.5j)[0] and not B.contains(0.0)[0]


def test_boundary_needs_angles():
    with pytest.raises(InputError):
        numrange_boundary(np.eye(2), 4)


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_hull_soundness(n, seed):
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    B = numrange_boundary(T)
    assert B.contains(sample_numrange(T, 500, rng)).all()
    assert B.distance_outside(10 * B.scale + 1j) > 0


def test_sector_bound_examples():
    assert sector_bound(np.diag([1.0, 3.0])).k == 0
    sb = sector_bound(np.array([[1, -1], [1, 1]], dtype=complex))
    assert sb.k == pytest.approx(1)
    J = Involution.from_matrix(np.diag([-1.0, 1.0]))
    L = np.diag([-1.0, 1.0]) + offdiag(1.0)
    assert sector_bound(J.J @ L).k == pytest.approx(1)


def test_sector_bound_degenerate():
    # Hermitian part singular with skew action on its kernel: unbounded sector
    assert sector_bound(np.array([[0, 1], [-1, 1]], dtype=complex)).k == math.inf
    assert sector_bound(np.zeros((2, 2))).k == 0
    with pytest.raises(NotAccretive):
        sector_bound(np.diag([-1.0, 1.0]))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_sector_bound_vs_sweep_and_witness(n, seed):
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = (T + T.conj().T) / 2
    S = T + (0.5 - np.linalg.eigvalsh(H)[0]) * np.eye(n)
    sb = sector_bound(S)
    k_sweep = math.tan(np.abs(np.angle(numrange_boundary(S, 2880).points)).max())
    assert k_sweep == pytest.approx(sb.k, rel=1e-4, abs=1e-12)
    z = np.vdot(sb.witness, S @ sb.witness)
    assert abs(z.imag) / z.real == pytest.approx(sb.k, rel=1e-6, abs=1e-12)
    samples = sample_numrange(S, 2000, rng)
    assert (np.abs(samples.imag) / samples.real).max() <= sb.k * (1 + 1e-9) + 1e-12


def test_ellipse_examples():
    e = ellipse_2x2(2.0, 5.0, 0)
    assert e["k"] == 0
    assert e["foci"] == (2, 5) and e["axes"] == pytest.approx((3, 0))
    e = ellipse_2x2(1.0, 1.0, 1.0)
    assert e["k"] == pytest.approx(1)
    assert e["foci"][0] == pytest.approx(1 - 1j) and e["foci"][1] == pytest.approx(1 + 1j)
    e = ellipse_2x2(1.0, 4.0, 2j)
    assert e["k"] == pytest.approx(1)
    # cross-check against the boundary sweep: k and the axes of the ellipse
    B = numrange_boundary(e["matrix"], 2000)
    assert math.tan(np.abs(np.angle(B.points)).max()) == pytest.approx(1, rel=1e-5)
    major, minor = e["axes"]
    f1, f2 = e["foci"]
    u = (f2 - f1) / abs(f2 - f1)
    along = B.points / u  # rotate the focal axis onto the real line
    assert np.ptp(along.real) == pytest.approx(major, rel=1e-6)
    assert np.ptp(along.imag) == pytest.approx(minor, rel=1e-6)
    with pytest.raises(NonPositiveDiagonal):
        ellipse_2x2(0.0, 1.0, 1.0)


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(-3, 3), st.floats(-3, 3))
def test_ellipse_contains_numerical_range(alpha, beta, gr, gi):
    e = ellipse_2x2(alpha, beta, complex(gr, gi))
    f1, f2 = e["foci"]
    major, _ = e["axes"]
    pts = numrange_boundary(e["matrix"], 256).points
    # boundary points satisfy |z - f1| + |z - f2| = major
    assert np.allclose(np.abs(pts - f1) + np.abs(pts - f2), major, rtol=1e-9, atol=1e-9)
    assert e["k"] == pytest.approx(sector_bound(e["matrix"]).k, rel=1e-9)


def test_pair_compression_free_case():
    A = np.diag([-2.0, 3.0])
    J = Involution.from_matrix(np.diag([-1.0, 1.0]))
    M = pair_compression(A, np.zeros((2, 2)), J, 0.7, [1, 0], [0, 1])
    assert np.allclose(M, np.diag([0.7 - 4, 9 - 0.7]))


def test_pair_compression_matches_inner_products():
    inst = gen_tsharp(TsharpParams(0.3, 1.0, 0.2, 0.1))
    A, V, J = inst.A, inst.V, inst.J
    L = A + V
    mu = 0.5
    T = J.J @ (L @ L - mu * np.eye(4))
    I = np.eye(4)
    for m in (1, 2):
        for p in (0, 3):
            M = pair_compression(A, V, J, mu, I[m], I[p])
            E = I[:, [m, p]]
            assert np.allclose(M, E.T @ T @ E, atol=1e-14)


def test_pair_compression_errors():
    J = Involution.from_matrix(np.diag([-1.0, 1.0]))
    A = np.diag([-1.0, 1.0])
    with pytest.raises(NotOffDiagonal):
        pair_compression(A, np.eye(2), J, 0.0, [1, 0], [0, 1])
    with pytest.raises(NotInSubspace):
        pair_compression(A, offdiag(1.0), J, 0.0, [0, 1], [0, 1])


@given(st.integers(0, 2**32 - 1))
def test_pair_compression_inside_range(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0, 1), 0
    b = a + rng.uniform(0.2, 2)
    inst = gen_tsharp(TsharpParams(a, b, *(rng.uniform(0, 0.45) * np.sqrt(b * b - a * a) * np.ones(2))))
    L = inst.A + inst.V
    mu = rng.uniform(0, 2 * b * b)
    B = numrange_boundary(inst.J.J @ (L @ L - mu * np.eye(4)))

    def unit(P):
        x = P @ (rng.standard_normal(4) + 1j * rng.standard_normal(4))
        return x / np.linalg.norm(x)

    M = pair_compression(inst.A, inst.V, inst.J, mu, unit(inst.J.P_minus), unit(inst.J.P_plus))
    assert B.contains(numrange_boundary(M, 64).points).all()
