import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from subpert.bounds import kappa_mu, kappa_piecewise, spectral_norm
from subpert.errors import ConditionViolated, GridViolatesCutoff, InfeasibleSpec, InputError
from subpert.rotation_geometry import direct_rotation
from subpert.scenarios import (KsharpGrid, RandomSpec, TsharpParams, gen_involution_pair,
                               gen_ksharp, gen_random, gen_relemma_instance, gen_tsharp,
                               random_unitary, stream, tsharp_max_theta, tsharp_theta)
from subpert.spectral_core import accretivity_margin, anticommutes, involution_from_split


def test_stream_is_reproducible():
    assert stream(3, 7).random() == stream(3, 7).random()
    assert stream(3, 7).random() != stream(3, 8).random()
    assert stream(-1, 0).random() == stream(2**64 - 1, 0).random()


@pytest.mark.parametrize("n", [1, 2, 7])
def test_random_unitary(n, rng):
    U = random_unitary(n, rng)
    assert np.linalg.norm(U.conj().T @ U - np.eye(n)) < 1e-12


def test_tsharp_examples():
    inst = gen_tsharp(TsharpParams(0.4, 1.0, 0.0, 0.0))
    assert inst.theta_closed_form == 0 and not inst.V.any()
    inst = gen_tsharp(TsharpParams(0.0, 1.0, 0.25, 0.25))
    assert inst.theta_closed_form == pytest.approx(math.atan(0.5))
    assert spectral_norm(inst.V) == pytest.approx(0.5)
    assert np.allclose(inst.J.J, np.diag([1, -1, -1, 1]))
    assert tsharp_theta(0.5, 1.0, 0.3, 0.0) == pytest.approx(0.5 * math.atan(1.2))
    assert round(tsharp_theta(0.5, 1.0, 0.3, 0.0), 5) == 0.43803
    with pytest.raises(ConditionViolated):
        gen_tsharp(TsharpParams(0.6, 1.0, 0.5, 0.3))
    with pytest.raises(InputError):
        gen_tsharp(TsharpParams(1.0, 0.5, 0.1, 0.1))


@given(st.floats(0, 2), st.floats(0.05, 2), st.floats(0, 1), st.floats(0, 0.98))
@example(0.0, 1.0, 0.25, 1e-9)  # outward eigenvalue shift below rounding
def test_tsharp_closed_form_matches_rotation(a, gap, w, frac):
    b = a + gap
    v = frac * math.sqrt(b * b - a * a)
    inst = gen_tsharp(TsharpParams(a, b, w * v, (1 - w) * v))
    from subpert.bounds import perturbed_involution
    J, Jp = perturbed_involution(inst.A, inst.V, inst.split)
    assert direct_rotation(J, Jp).theta == pytest.approx(inst.theta_closed_form, abs=1e-10)


def test_tsharp_max_theta():
    assert tsharp_max_theta(0.3, 1.0, 0.0) == 0
    assert tsharp_max_theta(0.0, 1.0, 0.5) == pytest.approx(math.atan(0.5), abs=1e-12)
    target = 0.5 * math.atan(kappa_piecewise(0.5, 0.5, 2.0))
    assert tsharp_max_theta(0.5, 1.0, 0.5) == pytest.approx(target, abs=1e-6)
    with pytest.raises(ConditionViolated):
        tsharp_max_theta(0.0, 1.0, 1.0)


def test_ksharp_examples():
    inst = gen_ksharp(KsharpGrid(0.5, 0.0, 4, 3.0))
    assert np.allclose(inst.Jp.J, inst.J.J) and inst.theta_exact == 0
    inst = gen_ksharp(KsharpGrid(0.5, 1.0, 8, 3.0))
    assert inst.theta_exact == pytest.approx(math.pi / 8)
    e1, e2 = inst.JJprime_spectrum
    assert e1 == pytest.approx((1 - 1j) / math.sqrt(2)) and e2 == pytest.approx((1 + 1j) / math.sqrt(2))
    assert direct_rotation(inst.J, inst.Jp).theta == pytest.approx(math.pi / 8, abs=1e-12)
    inst = gen_ksharp(KsharpGrid(0.0, 2.0, 3, 1.0))
    assert round(inst.theta_exact, 5) == 0.55357
    assert kappa_mu(inst.A, inst.V, inst.J, 0.0) == pytest.approx(2, abs=1e-10)


def test_ksharp_grid_is_symmetric():
    inst = gen_ksharp(KsharpGrid(0.25, 1.0, 5, 2.0))
    lam = np.linalg.eigvalsh(inst.A)
    assert np.allclose(np.sort(lam), np.sort(-lam))
    assert np.abs(lam).min() >= 0.25


@pytest.mark.parametrize("grid", [KsharpGrid(0.5, 1.0, 0, 3.0), KsharpGrid(1.0, 1.0, 4, 0.5),
                                  KsharpGrid(-0.1, 1.0, 4, 3.0), KsharpGrid(0.1, -1.0, 4, 3.0)])
def test_ksharp_invalid(grid):
    with pytest.raises(GridViolatesCutoff):
        gen_ksharp(grid)


@given(st.integers(1, 6), st.integers(2, 6), st.sampled_from(["subordinated", "annular"]),
       st.floats(0.1, 3), st.floats(0, 3), st.integers(0, 2**63))
def test_random_instances_are_valid(nm, npl, disp, d, v, seed):
    spec = RandomSpec(nm, npl, disp, d, 2.5 * d if disp == "annular" else None, 1.0, v, seed)
    inst = gen_random(spec)
    again = gen_random(spec)
    assert np.array_equal(inst.A, again.A) and np.array_equal(inst.V, again.V)
    J = involution_from_split(inst.A, inst.split)
    assert anticommutes(inst.V, J)
    assert inst.split.d == pytest.approx(d, rel=1e-12)
    assert spectral_norm(inst.V) == pytest.approx(v, rel=1e-12, abs=1e-300)
    lam = np.linalg.eigvalsh(inst.A)
    assert int(inst.split.classify(lam, 1e-9 * max(1, np.abs(lam).max())).sum()) == nm


def test_random_zero_perturbation():
    inst = gen_random(RandomSpec(2, 3, "subordinated", 1.0, v_norm=0.0))
    assert not inst.V.any()


@pytest.mark.parametrize("spec", [
    RandomSpec(2, 3, "annular", 1.0, 1.0),
    RandomSpec(2, 3, "annular", 1.0, 1.5),
    RandomSpec(2, 3, "annular", 1.0, None),
    RandomSpec(2, 1, "annular", 1.0, 3.0),
    RandomSpec(0, 3, "subordinated", 1.0),
    RandomSpec(2, 3, "subordinated", 0.0),
])
def test_infeasible_specs(spec):
    with pytest.raises(InfeasibleSpec):
        gen_random(spec)


@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_relemma_instances(n, seed):
    inst = gen_relemma_instance(n, seed)
    scale = np.linalg.norm(inst.T, 2)
    assert accretivity_margin(inst.G @ inst.T) >= -1e-10 * scale
    assert accretivity_margin(inst.G.conj().T @ inst.T.conj().T) >= -1e-10 * scale


def test_relemma_deterministic_and_free_case():
    a, b = gen_relemma_instance(2, 1), gen_relemma_instance(2, 1)
    assert np.array_equal(a.G, b.G) and np.array_equal(a.T, b.T)
    with pytest.raises(InputError):
        gen_relemma_instance(1, 0)


def test_involution_pairs():
    J, Jp = gen_involution_pair(5, 3)
    assert J.n == Jp.n == 5
    with pytest.raises(InputError):
        gen_involution_pair(1, 0, acute=False)
