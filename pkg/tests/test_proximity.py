"""Closest-point geometry: brute-force and finite-difference oracles."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rssa.dynamics import ArmState, DEFAULT_PARAMS, forward_kinematics
from rssa.proximity import (ObstacleEstimator, ObstacleObservation,
                            closest_point, point_jacobian, proximity_report)

angles = st.floats(-math.pi, math.pi, allow_nan=False)
coords = st.floats(-0.7, 0.7, allow_nan=False)


def brute_force_distance(phys, theta, p, n=4001):
    """Dense sampling of both segments; lower-bounds accuracy ~ reach/n."""
    base = np.zeros(2)
    elbow, tip = forward_kinematics(phys, theta)
    best = math.inf
    for a, b in ((base, elbow), (elbow, tip)):
        ts = np.linspace(0.0, 1.0, n)[:, None]
        pts = a + ts * (b - a)
        best = min(best, float(np.linalg.norm(pts - p, axis=1).min()))
    return best


@settings(max_examples=50, deadline=None)
@given(angles, angles, coords, coords)
def test_closest_point_matches_brute_force(t1, t2, px, py):
    p = np.array([px, py])
    _, _, _, d = closest_point(DEFAULT_PARAMS, (t1, t2), p)
    assert d == pytest.approx(brute_force_distance(DEFAULT_PARAMS, (t1, t2), p),
                              abs=1e-3)


def test_closest_point_interior_and_endpoint():
    # straight arm along +x: interior foot point below link 1
    pt, link, s, d = closest_point(DEFAULT_PARAMS, (0.0, 0.0), (0.1, -0.2))
    assert link == 1
    assert np.allclose(pt, [0.1, 0.0])
    assert s == pytest.approx(0.1)
    assert d == pytest.approx(0.2)
    # beyond the tip: endpoint clamp
    pt, link, s, d = closest_point(DEFAULT_PARAMS, (0.0, 0.0), (0.9, 0.0))
    assert link == 2
    assert s == pytest.approx(DEFAULT_PARAMS.l2)
    assert d == pytest.approx(0.9 - DEFAULT_PARAMS.reach)


def test_elbow_tie_goes_to_link_2():
    # obstacle on the extension of link 1 with the elbow bent past a right
    # angle: both links clamp to the elbow at the same distance
    elbow, _ = forward_kinematics(DEFAULT_PARAMS, (0.3, 1.9))
    p = elbow * (1.0 + 0.3 / np.linalg.norm(elbow))
    _, link, s, _ = closest_point(DEFAULT_PARAMS, (0.3, 1.9), p)
    assert link == 2
    assert s == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(angles, angles, st.floats(0.01, 0.24), st.integers(1, 2))
def test_point_jacobian_matches_finite_difference(t1, t2, s, link):
    h = 1e-7
    th = np.array([t1, t2])

    def pos(theta):
        tt1, tt2 = theta
        if link == 1:
            return s * np.array([math.cos(tt1), math.sin(tt1)])
        e = DEFAULT_PARAMS.l1 * np.array([math.cos(tt1), math.sin(tt1)])
        return e + s * np.array([math.cos(tt1 + tt2), math.sin(tt1 + tt2)])

    jac = point_jacobian(DEFAULT_PARAMS, th, link, s)
    for j in range(2):
        dth = np.zeros(2)
        dth[j] = h
        fd = (pos(th + dth) - pos(th - dth)) / (2.0 * h)
        assert np.allclose(jac[:, j], fd, atol=1e-6)


def test_d_dot_matches_finite_difference():
    state = ArmState(theta=(0.4, 1.1), theta_dot=(0.5, -0.8))
    obs = ObstacleObservation(pos=(0.45, 0.35), vel=(-0.2, 0.1),
                              pos_true=(0.45, 0.35))
    rep = proximity_report(DEFAULT_PARAMS, state, obs)
    h = 1e-7
    ds = []
    for sgn in (1.0, -1.0):
        th = state.theta_arr() + sgn * h * state.theta_dot_arr()
        p = obs.pos_arr() + sgn * h * obs.vel_arr()
        _, _, _, d = closest_point(DEFAULT_PARAMS, th, p)
        ds.append(d)
    fd = (ds[0] - ds[1]) / (2.0 * h)
    assert rep.d_dot == pytest.approx(fd, abs=1e-6)


def test_proximity_report_zero_distance_uses_fallback_direction():
    state = ArmState(theta=(0.0, 0.0), theta_dot=(0.0, 0.0))
    obs = ObstacleObservation(pos=(0.1, 0.0), vel=(0.0, 0.3),
                              pos_true=(0.1, 0.0))
    rep = proximity_report(DEFAULT_PARAMS, state, obs, fallback_delta=(0.0, 2.0))
    assert rep.d == 0.0
    assert rep.delta == (0.0, 1.0)          # normalized fallback
    assert rep.d_dot == pytest.approx(0.3)  # delta . v_obstacle


def test_estimator_noise_bounded_and_deterministic():
    est_a = ObstacleEstimator(0.01, 0.01, seed=7)
    est_b = ObstacleEstimator(0.01, 0.01, seed=7)
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = rng.uniform(-1.0, 1.0, size=2)
        oa = est_a.observe(p)
        ob = est_b.observe(p)
        assert oa == ob
        assert abs(oa.pos[0] - p[0]) <= 0.01
        assert abs(oa.pos[1] - p[1]) <= 0.01
        assert oa.pos_true == (p[0], p[1])


def test_estimator_recovers_constant_velocity_without_noise():
    est = ObstacleEstimator(0.0, 0.01, seed=0)
    v = np.array([0.3, -0.2])
    obs = None
    for k in range(50):
        obs = est.observe(k * 0.01 * v)
    assert np.allclose(obs.vel, v, atol=1e-9)


def test_estimator_rejects_bad_dt():
    with pytest.raises(ValueError):
        ObstacleEstimator(0.01, 0.0, seed=0)
