import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helixphase.errors import DegenerateConfigurationError
from helixphase.field import (
    HelicalFieldParams,
    RotatingFrameParams,
    adiabaticity_ratio,
    helical_field,
    helical_params_from_frame,
    reconstruct_field,
    rotating_frame_params,
    spin_axis,
    transitionless_field,
)

ratios = st.floats(1e-2, 10.0)
angles = st.floats(0.0, math.pi)


def test_params_validation():
    with pytest.raises(ValueError):
        HelicalFieldParams(B0=-1, phi=0.1, L=1, v=1)
    with pytest.raises(ValueError):
        HelicalFieldParams(B0=1, phi=3.5, L=1, v=1)
    with pytest.raises(ValueError):
        HelicalFieldParams(B0=1, phi=0.1, L=1, v=1, turns=0)
    with pytest.raises(ValueError):
        HelicalFieldParams(B0=1, phi=0.1, L=1, v=float("nan"))


def test_derived_quantities():
    p = HelicalFieldParams(B0=1.0, phi=0.5, L=2.0, v=4.0, kappa=3.0, turns=3)
    assert p.omega == pytest.approx(4 * math.pi)
    assert p.T == pytest.approx(1.5)
    assert p.c == pytest.approx(4 * math.pi / 3)


def test_helical_field_examples():
    p = HelicalFieldParams(B0=1.0, phi=math.pi / 2, L=1.0, v=1.0)
    np.testing.assert_allclose(helical_field(p, 0.0), [1, 0, 0], atol=1e-15)
    p = HelicalFieldParams(B0=1.0, phi=0.0, L=1.0, v=1.0)
    np.testing.assert_allclose(helical_field(p, 0.37), [0, 0, 1], atol=1e-15)
    # hand substitution: 2*[(sqrt3/2)(cos pi/2, sin pi/2), 1/2]
    p = HelicalFieldParams(B0=2.0, phi=math.pi / 3, L=1.0, v=1.0)
    np.testing.assert_allclose(helical_field(p, 0.25), [0, math.sqrt(3), 1], atol=1e-15)


def test_helical_field_broadcasts():
    p = HelicalFieldParams(B0=1.0, phi=1.0, L=1.0, v=1.0)
    assert helical_field(p, np.zeros((4, 5))).shape == (3, 4, 5)


def test_spin_axis_examples():
    np.testing.assert_allclose(spin_axis(0.0, 3.0, 1.7), [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(spin_axis(math.pi / 2, 2 * math.pi, 0.25), [0, 1, 0], atol=1e-15)
    h = math.sqrt(2) / 2
    np.testing.assert_allclose(spin_axis(math.pi / 4, 2 * math.pi, 1.0), [h, 0, h], atol=1e-15)


@given(B0=st.floats(1e-3, 1e3), phi=angles, t=st.floats(0, 100))
def test_field_magnitude_constant(B0, phi, t):
    p = HelicalFieldParams(B0=B0, phi=phi, L=0.7, v=3.0, kappa=2.0)
    assert np.linalg.norm(helical_field(p, t)) == pytest.approx(B0, rel=1e-12)


@given(theta=angles, omega=st.floats(0.1, 50), t=st.floats(0, 10))
def test_spin_axis_unit_and_periodic(theta, omega, t):
    s = spin_axis(theta, omega, t)
    assert abs(np.linalg.norm(s) - 1.0) < 1e-12
    np.testing.assert_allclose(spin_axis(theta, omega, t + 2 * math.pi / omega), s, atol=1e-12)


def test_rotating_frame_examples():
    # c -> 0: v tiny
    p = HelicalFieldParams(B0=1.0, phi=0.8, L=1.0, v=1e-12, kappa=1.0)
    f = rotating_frame_params(p)
    assert f.B == pytest.approx(1.0, abs=1e-11)
    assert f.theta == pytest.approx(0.8, abs=1e-11)

    f = rotating_frame_params(HelicalFieldParams.from_ratio(3.7, 0.0))
    assert f.B == pytest.approx(1.0, rel=1e-15)
    assert f.theta == 0.0

    # phi = pi/2, B0 = c: B = B0/sqrt2, theta = pi/4 by hand
    f = rotating_frame_params(HelicalFieldParams.from_ratio(1.0, math.pi / 2, B0=2.0))
    assert f.B == pytest.approx(2.0 / math.sqrt(2), rel=1e-14)
    assert f.theta == pytest.approx(math.pi / 4, rel=1e-14)


def test_theta_branch_when_denominator_negative():
    # B0 cos(phi) + c < 0: plain arctan would return a negative angle
    f = rotating_frame_params(HelicalFieldParams.from_ratio(0.2, 2.8))
    assert math.pi / 2 < f.theta <= math.pi


def test_degenerate_configuration():
    with pytest.raises(DegenerateConfigurationError):
        rotating_frame_params(HelicalFieldParams.from_ratio(1.0, math.pi))


def test_negative_B_region_is_computed():
    f = rotating_frame_params(HelicalFieldParams.from_ratio(3.0, 3.0))
    assert f.B < 0


def test_reconstruct_theta_zero():
    np.testing.assert_allclose(
        reconstruct_field(RotatingFrameParams(B=1.3, theta=0.0), 2.0, 5.0, 0.4), [0, 0, 1.3], atol=1e-15
    )


def test_decomposition_identity_random():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(1000):
        p = HelicalFieldParams.from_ratio(10 ** rng.uniform(-2, 1), rng.uniform(0, math.pi))
        t = rng.uniform(0, 3 * p.T)
        try:
            frame = rotating_frame_params(p)
        except DegenerateConfigurationError:
            continue
        worst = max(worst, np.max(np.abs(reconstruct_field(frame, p.kappa, p.omega, t) - helical_field(p, t))))
    assert worst < 1e-12


@pytest.mark.parametrize("r,phi", [(0.05, 0.3), (1.0, 1.2), (4.0, 2.5)])
def test_transitionless_field_finite_difference(r, phi):
    p = HelicalFieldParams.from_ratio(r, phi, kappa=1.7)
    frame = rotating_frame_params(p)
    t = np.linspace(0, p.T, 7)
    h = 1e-6 * (2 * math.pi / p.omega)
    dS = (spin_axis(frame.theta, p.omega, t + h) - spin_axis(frame.theta, p.omega, t - h)) / (2 * h)
    fd = transitionless_field(frame, p.kappa, p.omega, t, axis_rate=dS)
    np.testing.assert_allclose(fd, reconstruct_field(frame, p.kappa, p.omega, t), atol=1e-6)
    np.testing.assert_allclose(transitionless_field(frame, p.kappa, p.omega, t), helical_field(p, t), atol=1e-12)


def test_adiabaticity_ratio_scaling():
    p = HelicalFieldParams(B0=1.0, phi=1.0, L=1.0, v=2.0, kappa=3.0)
    r = adiabaticity_ratio(p)
    assert r == pytest.approx(2 * math.pi * 2.0 / 3.0)
    assert adiabaticity_ratio(HelicalFieldParams(B0=2.0, phi=1.0, L=1.0, v=2.0, kappa=3.0)) == pytest.approx(r / 2)
    assert adiabaticity_ratio(HelicalFieldParams(B0=1.0, phi=1.0, L=1.0, v=4.0, kappa=3.0)) == pytest.approx(2 * r)
    assert adiabaticity_ratio(HelicalFieldParams.from_ratio(1.0, 0.4, B0=5.0)) == pytest.approx(1.0)


@settings(max_examples=200)
@given(r=ratios, phi=angles, lam=st.floats(0.1, 10.0))
def test_scale_invariance(r, phi, lam):
    p = HelicalFieldParams.from_ratio(r, phi)
    q = HelicalFieldParams.from_ratio(r, phi, B0=lam)  # c scales with B0 at fixed r
    try:
        a, b = rotating_frame_params(p), rotating_frame_params(q)
    except DegenerateConfigurationError:
        return
    assert b.theta == pytest.approx(a.theta, abs=1e-12)
    assert b.B == pytest.approx(lam * a.B, rel=1e-9, abs=1e-12 * lam)


@pytest.mark.parametrize("phi", [0.3, 1.0, 1.5, 2.2, 2.9])
def test_adiabatic_limit_slope(phi):
    devs = [rotating_frame_params(HelicalFieldParams.from_ratio(r, phi)).theta - phi for r in (1e-3, 1e-4, 1e-5)]
    for r, d in zip((1e-3, 1e-4, 1e-5), devs):
        assert abs(d) <= r * math.sin(phi) * (1 + 2 * r) + 1e-15
    # slope -sin(phi)
    assert devs[-1] / 1e-5 == pytest.approx(-math.sin(phi), rel=1e-4)


@pytest.mark.parametrize("B,theta", [(1.0, 0.4), (2.5, 1.9), (0.3, 0.01)])
def test_params_from_frame_roundtrip(B, theta):
    p = helical_params_from_frame(RotatingFrameParams(B, theta), L=0.5, v=0.2, kappa=1.3, turns=2)
    f = rotating_frame_params(p)
    assert f.B == pytest.approx(B, rel=1e-12)
    assert f.theta == pytest.approx(theta, abs=1e-12)
    assert p.turns == 2
