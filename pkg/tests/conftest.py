"""Shared fixtures and instance generators for the test suite."""
import math

import numpy as np
import pytest

from rssa.dynamics import ArmState, DEFAULT_PARAMS, xi_interval
from rssa.proximity import ObstacleObservation, closest_point, proximity_report
from rssa.safety_index import SafetyConfig, family_lie_derivatives


@pytest.fixture
def phys():
    return DEFAULT_PARAMS


@pytest.fixture
def interval(phys):
    return xi_interval(phys)


@pytest.fixture
def cfg(interval):
    return SafetyConfig.for_interval(interval)


def random_cone_family(rng, n=27, spread=0.5, active=True):
    """Random feasible family instance (lf, lg, eta).

    All control rows lie inside a cone of half-angle `spread` (< pi/4), so
    every pairwise cosine is positive and the certificate holds.  With
    `active` the worst drift term plus eta is strictly positive, so the
    override actually fires.
    """
    heading = rng.uniform(0.0, 2.0 * np.pi)
    angles = heading + rng.uniform(-spread, spread, size=n)
    norms = rng.uniform(0.1, 2.0, size=n)
    lg = norms[:, None] * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    lf = rng.uniform(-1.0, 1.0, size=n)
    eta = rng.uniform(0.01, 0.5)
    if active:
        lf[rng.integers(n)] = rng.uniform(0.2, 3.0)
    return lf, lg, eta


def random_clear_state(rng, phys=DEFAULT_PARAMS):
    """State/obstacle pair away from the arm and from link switches."""
    while True:
        theta = rng.uniform(-math.pi, math.pi, size=2)
        theta_dot = rng.uniform(-1.5, 1.5, size=2)
        pos = rng.uniform(-0.6, 0.6, size=2)
        vel = rng.uniform(-0.5, 0.5, size=2)
        _, _, s_arc, d = closest_point(phys, theta, pos)
        if 0.05 < d < 0.5 and 0.02 < s_arc:
            state = ArmState(theta=tuple(theta), theta_dot=tuple(theta_dot))
            obs = ObstacleObservation(pos=tuple(pos), vel=tuple(vel),
                                      pos_true=tuple(pos))
            return state, obs


def random_pipeline_family(rng, cfg, samples, phys=DEFAULT_PARAMS):
    """(lf, lg, eta) produced by the real geometry/dynamics pipeline, with
    eta shifted so the constraint is active."""
    state, obs = random_clear_state(rng, phys)
    rep = proximity_report(phys, state, obs)
    lf, lg = family_lie_derivatives(cfg, phys, state, rep, obs, samples)
    eta = rng.uniform(0.05, 0.5)
    if float(lf.max()) + eta <= 0.0:
        eta = -float(lf.max()) + rng.uniform(0.05, 0.5)
    return lf, lg, eta
