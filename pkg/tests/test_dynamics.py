import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from helixphase.analytic import polarization_exact
from helixphase.dynamics import (
    SIGMA_Z,
    SPIN_DOWN,
    SPIN_UP,
    Spinor,
    apply_steps,
    evolve,
    hamiltonian_matrix,
    midpoint_coefficients,
    polarization_z,
    propagate,
    step_propagator,
)
from helixphase.errors import NonConvergedError
from helixphase.field import HelicalFieldParams


def test_spinor_requires_normalization():
    with pytest.raises(ValueError):
        Spinor(1.0, 1.0)
    s = Spinor.from_array([1.0, 1j], normalize=True)
    assert abs(s.up) == pytest.approx(1 / math.sqrt(2))
    np.testing.assert_array_equal(np.asarray(s), s.to_array())


def test_hamiltonian_examples():
    H = hamiltonian_matrix([0, 0, 2.0], 3.0)
    np.testing.assert_allclose(H, np.diag([-3.0, 3.0]))
    H = hamiltonian_matrix([2.0, 0, 0], 3.0)
    np.testing.assert_allclose(H, [[0, -3.0], [-3.0, 0]])


def test_hamiltonian_eigenvalues_random():
    rng = np.random.default_rng(3)
    for _ in range(50):
        b = rng.normal(size=3)
        kappa = rng.uniform(0.1, 5)
        H = hamiltonian_matrix(b, kappa)
        np.testing.assert_allclose(H, H.conj().T)
        assert abs(np.trace(H)) < 1e-15
        half = kappa * np.linalg.norm(b) / 2
        np.testing.assert_allclose(np.linalg.eigvalsh(H), [-half, half], rtol=1e-12)


def test_step_propagator_identity_and_larmor():
    np.testing.assert_allclose(step_propagator(np.zeros((2, 2)), 0.7), np.eye(2))
    kappa, B = 2.0, 1.5
    U = step_propagator(-kappa * B * SIGMA_Z / 2, 2 * math.pi / (kappa * B))
    np.testing.assert_allclose(U, -np.eye(2), atol=1e-15)


def test_step_propagator_matches_expm():
    rng = np.random.default_rng(7)
    for _ in range(50):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        H = A + A.conj().T
        dt = rng.uniform(0.01, 2.0)
        np.testing.assert_allclose(step_propagator(H, dt), expm(-1j * H * dt), atol=1e-13)


def test_step_propagator_semigroup():
    H = hamiltonian_matrix([0.3, -1.2, 0.8], 1.7)
    np.testing.assert_allclose(step_propagator(H, 0.4) @ step_propagator(H, 0.9), step_propagator(H, 1.3), atol=1e-13)


@given(h=st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3), dt=st.floats(1e-6, 10.0))
def test_step_propagator_unitary(h, dt):
    H = hamiltonian_matrix(h, 1.0)
    U = step_propagator(H, dt)
    assert np.max(np.abs(U.conj().T @ U - np.eye(2))) < 1e-12
    assert abs(abs(np.linalg.det(U)) - 1) < 1e-12


def test_polarization_z():
    assert polarization_z(SPIN_UP) == 1.0
    assert polarization_z(SPIN_DOWN) == -1.0
    assert polarization_z([1 / math.sqrt(2), 1 / math.sqrt(2)]) == pytest.approx(0.0, abs=1e-15)


def test_kernel_matches_step_propagator():
    p = HelicalFieldParams.from_ratio(0.7, 1.1)
    h, dt = midpoint_coefficients(p, 64)
    psi = np.array([0.6, 0.8j])
    ref = psi.copy()
    for k in range(64):
        H = h[k, 0] * np.array([[0, 1], [1, 0]]) + h[k, 1] * np.array([[0, -1j], [1j, 0]]) + h[k, 2] * SIGMA_Z
        ref = step_propagator(H, dt) @ ref
    np.testing.assert_allclose(apply_steps(h, dt, psi), ref, atol=1e-14)


def test_aligned_field_keeps_polarization():
    res = evolve(HelicalFieldParams.from_ratio(0.3, 0.0, kappa=2.0), SPIN_UP, 64)
    assert res.polarization_z == 1.0


def test_static_field_larmor_phase():
    # phi = 0 is a constant field along z: a(t) = exp(i kappa B0 t / 2) a(0)
    p = HelicalFieldParams(B0=1.3, phi=0.0, L=1.0, v=0.2, kappa=2.0)
    res = evolve(p, SPIN_UP, 64, record=True)
    expected = np.exp(0.5j * p.kappa * p.B0 * res.times)
    np.testing.assert_allclose(res.states[:, 0], expected, atol=1e-12)


@pytest.mark.parametrize("r,phi,turns", [(0.1, 0.7, 1), (1.0, 1.6, 2), (2.0, 2.4, 3)])
def test_evolve_against_closed_form(r, phi, turns):
    p = HelicalFieldParams.from_ratio(r, phi, turns=turns)
    res = evolve(p, SPIN_UP, 2048)
    assert abs(res.polarization_z - polarization_exact(p)) < max(1e-8, 10 * res.richardson_error)
    assert res.norm_drift < 1e-10
    assert res.steps == 2 * 2048 * turns


def test_second_order_convergence():
    p = HelicalFieldParams.from_ratio(0.5, 1.0)
    target = polarization_exact(p)
    errs = [abs(polarization_z(propagate(p, SPIN_UP, n)) - target) for n in (64, 128, 256, 512)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    for q in ratios:
        assert 3.5 <= q <= 4.5


def test_norm_preserved_over_million_steps():
    p = HelicalFieldParams.from_ratio(0.3, 1.0, turns=4)
    psi = propagate(p, SPIN_UP, 10**6)
    assert abs(np.linalg.norm(psi) - 1) < 1e-10


def test_time_reversal():
    p = HelicalFieldParams.from_ratio(0.4, 2.0, turns=2)
    h, dt = midpoint_coefficients(p, 5000)
    psi0 = np.array([0.6, 0.8j])
    forward = apply_steps(h, dt, psi0)
    back = apply_steps(h[::-1], -dt, forward)
    np.testing.assert_allclose(back, psi0, atol=1e-10)


def test_global_phase_covariance():
    p = HelicalFieldParams.from_ratio(0.8, 1.3)
    rng = np.random.default_rng(11)
    base = evolve(p, SPIN_UP, 256).final_state.to_array()
    for alpha in rng.uniform(-math.pi, math.pi, 5):
        shifted = evolve(p, np.exp(1j * alpha) * SPIN_UP.to_array(), 256).final_state.to_array()
        np.testing.assert_allclose(shifted, base * np.exp(1j * alpha), atol=1e-12)


def test_refinement_reaches_tolerance():
    p = HelicalFieldParams.from_ratio(0.5, 1.0)
    res = evolve(p, SPIN_UP, 16, tol=1e-8)
    assert res.richardson_error <= 1e-8
    assert res.steps > 32


def test_nonconverged():
    p = HelicalFieldParams.from_ratio(0.5, 1.0)
    with pytest.raises(NonConvergedError) as info:
        evolve(p, SPIN_UP, 16, tol=1e-16, max_steps=2**12)
    assert info.value.steps <= 2**12


def test_steps_per_turn_lower_bound():
    with pytest.raises(ValueError):
        evolve(HelicalFieldParams.from_ratio(0.5, 1.0), SPIN_UP, 8)
