"""Arm model: lumped parameters, inertia, integration."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rssa.dynamics import (ArmState, DEFAULT_PARAMS, PhysicalParams, Torque,
                           XiInterval, XiVector, coriolis_matrix,
                           coriolis_vector, forward_dynamics,
                           forward_kinematics, kinetic_energy, mass_matrix,
                           step, xi_from_masses, xi_interval)

masses = st.floats(0.1, 50.0, allow_nan=False)
angles = st.floats(-math.pi, math.pi, allow_nan=False)
rates = st.floats(-5.0, 5.0, allow_nan=False)


def test_nominal_lumped_parameters():
    # midpoint masses of the case-study arm
    xi = xi_from_masses(DEFAULT_PARAMS, 27.75, 13.80)
    assert xi.xi1 == pytest.approx(1.775965, abs=1e-5)
    assert xi.xi2 == pytest.approx(0.335340, abs=1e-5)
    assert xi.xi3 == pytest.approx(0.465750, abs=1e-5)


def test_interval_is_exact_image_of_mass_box():
    # componentwise monotone, so corners bound every interior sample
    box = xi_interval(DEFAULT_PARAMS)
    rng = np.random.default_rng(0)
    for _ in range(200):
        m1 = rng.uniform(DEFAULT_PARAMS.m1_lo, DEFAULT_PARAMS.m1_hi)
        m2 = rng.uniform(DEFAULT_PARAMS.m2_lo, DEFAULT_PARAMS.m2_hi)
        assert box.contains(xi_from_masses(DEFAULT_PARAMS, m1, m2))


@given(masses, masses, angles)
def test_mass_matrix_positive_definite(m1, m2, t2):
    xi = xi_from_masses(DEFAULT_PARAMS, m1, m2)
    M = mass_matrix(xi, t2)
    assert np.allclose(M, M.T)
    eig = np.linalg.eigvalsh(M)
    assert np.all(eig > 0.0)


@given(masses, masses, angles, rates, rates)
def test_coriolis_matrix_matches_vector(m1, m2, t2, td1, td2):
    xi = xi_from_masses(DEFAULT_PARAMS, m1, m2)
    h = coriolis_vector(xi, t2, (td1, td2))
    C = coriolis_matrix(xi, t2, (td1, td2))
    assert np.allclose(C @ np.array([td1, td2]), h, atol=1e-12)


@given(angles, rates, rates)
def test_passivity_no_torque_conserves_energy(t2, td1, td2):
    # M_dot - 2C is skew for the Christoffel form: zero torque means the
    # kinetic energy drifts only through the integrator, not the model
    xi = xi_from_masses(DEFAULT_PARAMS, 27.75, 13.80)
    s = ArmState(theta=(0.3, t2), theta_dot=(td1, td2))
    e0 = kinetic_energy(xi, s)
    dt = 1e-5
    for _ in range(10):
        s = step(xi, s, Torque(0.0, 0.0), dt)
    assert kinetic_energy(xi, s) == pytest.approx(e0, rel=1e-3, abs=1e-9)


def test_forward_dynamics_inverts_mass_matrix():
    xi = xi_from_masses(DEFAULT_PARAMS, 27.75, 13.80)
    s = ArmState(theta=(0.2, 0.9), theta_dot=(0.4, -0.3))
    tau = Torque(1.5, -0.7)
    acc = forward_dynamics(xi, s, tau)
    M = mass_matrix(xi, s.theta[1])
    h = coriolis_vector(xi, s.theta[1], s.theta_dot)
    assert np.allclose(M @ acc + h, tau.as_array(), atol=1e-12)


def test_step_is_semi_implicit():
    # the angle update must use the already-updated rate
    xi = xi_from_masses(DEFAULT_PARAMS, 27.75, 13.80)
    s = ArmState(theta=(0.0, 1.0), theta_dot=(0.0, 0.0))
    dt = 0.01
    acc = forward_dynamics(xi, s, Torque(2.0, 1.0))
    nxt = step(xi, s, Torque(2.0, 1.0), dt)
    assert np.allclose(nxt.theta_dot_arr(), dt * acc)
    assert np.allclose(nxt.theta_arr(), s.theta_arr() + dt * nxt.theta_dot_arr())
    assert nxt.t == pytest.approx(dt)


def test_forward_kinematics_straight_arm():
    elbow, tip = forward_kinematics(DEFAULT_PARAMS, (0.0, 0.0))
    assert np.allclose(elbow, [DEFAULT_PARAMS.l1, 0.0])
    assert np.allclose(tip, [DEFAULT_PARAMS.reach, 0.0])


def test_torque_clip():
    assert Torque(25.0, -30.0).clipped(20.0) == Torque(20.0, -20.0)
    assert Torque(3.0, -4.0).clipped(20.0) == Torque(3.0, -4.0)
    t = Torque(25.0, 0.0)
    assert t.clipped(float("inf")) == t


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        PhysicalParams(l1=0.0, l2=0.27, m1_lo=1, m1_hi=2, m2_lo=1, m2_hi=2,
                       m1_true=1.5, m2_true=1.5)
    with pytest.raises(ValueError):
        PhysicalParams(l1=0.25, l2=0.27, m1_lo=2, m1_hi=1, m2_lo=1, m2_hi=2,
                       m1_true=1.5, m2_true=1.5)
    with pytest.raises(ValueError):
        PhysicalParams(l1=0.25, l2=0.27, m1_lo=1, m1_hi=2, m2_lo=1, m2_hi=2,
                       m1_true=5.0, m2_true=1.5)
    with pytest.raises(ValueError):
        XiInterval(XiVector(1, 1, 1), XiVector(0, 2, 2))
    with pytest.raises(ValueError):
        xi_from_masses(DEFAULT_PARAMS, -1.0, 1.0)


def test_interval_clamp_and_midpoint():
    box = XiInterval(XiVector(0.0, 0.0, 0.0), XiVector(2.0, 4.0, 6.0))
    assert box.midpoint() == XiVector(1.0, 2.0, 3.0)
    assert np.allclose(box.clamp(np.array([-1.0, 5.0, 3.0])), [0.0, 4.0, 3.0])
