"""Slotine-Li style adaptive reference controller and parameter estimator.

Produces the nominal torque tau_r tracking a joint-space trajectory and an
estimate xi_hat of the lumped parameters, kept inside its known interval by
boundary projection.  Gains follow the case study: K_D = 5*I, Lambda = I,
Gamma = diag(60, 100, 20).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import (ArmState, PhysicalParams, Torque, XiInterval, XiVector,
                       forward_kinematics)

__all__ = [
    "AdaptGains",
    "DesiredTrajectory",
    "EstimatorState",
    "regressor",
    "reference_control",
    "update_estimate",
    "make_trajectory",
]


@dataclass(frozen=True)
class AdaptGains:
    kd: np.ndarray = field(default_factory=lambda: 5.0 * np.eye(2), compare=False)
    lam: np.ndarray = field(default_factory=lambda: np.eye(2), compare=False)
    gamma: np.ndarray = field(default_factory=lambda: np.diag([60.0, 100.0, 20.0]),
                              compare=False)

    def __post_init__(self):
        kd = np.asarray(self.kd, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        for name, m in (("kd", kd), ("lam", lam)):
            if m.shape != (2, 2) or not np.allclose(m, m.T) or np.any(np.linalg.eigvalsh(m) <= 0):
                raise ValueError(f"{name} must be 2x2 symmetric positive definite")
        if gamma.shape != (3, 3) or abs(np.linalg.det(gamma)) < 1e-12:
            raise ValueError("gamma must be an invertible 3x3 matrix")
        object.__setattr__(self, "kd", kd)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gamma", gamma)


@dataclass(frozen=True)
class DesiredTrajectory:
    """Joint-space reference: callables of absolute time returning theta_d,
    theta_d_dot, theta_d_ddot."""

    theta0: np.ndarray
    theta_goal: np.ndarray
    t0: float
    duration: float
    goal_clipped: bool = False

    def _s(self, t: float) -> tuple[float, float, float]:
        # quintic time scaling with zero boundary velocity/acceleration
        if self.duration <= 0:
            return 1.0, 0.0, 0.0
        s = (t - self.t0) / self.duration
        if s <= 0.0:
            return 0.0, 0.0, 0.0
        if s >= 1.0:
            return 1.0, 0.0, 0.0
        p = s ** 3 * (10.0 - 15.0 * s + 6.0 * s * s)
        dp = (30.0 * s * s - 60.0 * s ** 3 + 30.0 * s ** 4) / self.duration
        ddp = (60.0 * s - 180.0 * s * s + 120.0 * s ** 3) / self.duration ** 2
        return p, dp, ddp

    def sample(self, t: float):
        p, dp, ddp = self._s(t)
        span = self.theta_goal - self.theta0
        return self.theta0 + p * span, dp * span, ddp * span


@dataclass(frozen=True)
class EstimatorState:
    xi_hat: XiVector
    interval: XiInterval
    xi_hat_dot: np.ndarray = field(default_factory=lambda: np.zeros(3), compare=False)

    def __post_init__(self):
        if not self.interval.contains(self.xi_hat, atol=1e-9):
            raise ValueError("xi_hat outside its interval")


def regressor(state: ArmState, theta_r_dot, theta_r_ddot) -> np.ndarray:
    """2x3 matrix Y with Y @ xi = M(xi) @ theta_r_ddot + C(xi) @ theta_r_dot."""
    c2 = math.cos(state.theta[1])
    s2 = math.sin(state.theta[1])
    td1, td2 = state.theta_dot
    ar1, ar2 = theta_r_ddot
    vr1, vr2 = theta_r_dot
    return np.array([
        [ar1, ar2, 2.0 * c2 * ar1 + c2 * ar2 - s2 * td2 * vr1 - s2 * (td1 + td2) * vr2],
        [0.0, ar1 + ar2, c2 * ar1 + s2 * td1 * vr1],
    ])


def reference_control(gains: AdaptGains, traj: DesiredTrajectory, state: ArmState,
                      est: EstimatorState):
    """Tracking torque tau_r and the sliding variable s.

    theta_r_dot = theta_d_dot - Lambda @ (theta - theta_d)
    theta_r_ddot = theta_d_ddot - Lambda @ (theta_dot - theta_d_dot)
    s = theta_dot - theta_r_dot
    tau_r = Y @ xi_hat - K_D @ s
    """
    th_d, td_d, tdd_d = traj.sample(state.t)
    e = state.theta_arr() - th_d
    e_dot = state.theta_dot_arr() - td_d
    theta_r_dot = td_d - gains.lam @ e
    theta_r_ddot = tdd_d - gains.lam @ e_dot
    s = state.theta_dot_arr() - theta_r_dot
    y = regressor(state, theta_r_dot, theta_r_ddot)
    tau = y @ est.xi_hat.as_array() - gains.kd @ s
    return Torque.from_array(tau), s, y


def update_estimate(gains: AdaptGains, est: EstimatorState, y: np.ndarray,
                    s: np.ndarray, dt: float) -> EstimatorState:
    """One Euler step of xi_hat_dot = -Gamma^-1 Y^T s, then interval clamp.

    The recorded rate is the realized post-clamp rate, so it is zero in a
    component pinned at its boundary.
    """
    raw_rate = -np.linalg.solve(gains.gamma, y.T @ s)
    proposed = est.xi_hat.as_array() + dt * raw_rate
    clamped = est.interval.clamp(proposed)
    realized = (clamped - est.xi_hat.as_array()) / dt
    return EstimatorState(xi_hat=XiVector.from_array(clamped),
                          interval=est.interval, xi_hat_dot=realized)


def _ik_elbow_branch(phys: PhysicalParams, goal: np.ndarray,
                     theta_now: np.ndarray) -> tuple[np.ndarray, bool]:
    """Inverse kinematics on a fixed elbow branch; unreachable goals are
    clipped to the reachable annulus boundary."""
    r = float(np.linalg.norm(goal))
    r_min = abs(phys.l1 - phys.l2)
    r_max = phys.l1 + phys.l2
    clipped = False
    if r < 1e-12:
        goal = np.array([r_min if r_min > 0 else 1e-9, 0.0])
        r = float(np.linalg.norm(goal))
        clipped = True
    if r > r_max:
        goal = goal * (r_max / r)
        r = r_max
        clipped = True
    elif r < r_min:
        goal = goal * (r_min / r)
        r = r_min
        clipped = True
    c2 = (r * r - phys.l1 ** 2 - phys.l2 ** 2) / (2.0 * phys.l1 * phys.l2)
    c2 = min(1.0, max(-1.0, c2))
    t2 = math.acos(c2)  # elbow-down branch
    t1 = math.atan2(goal[1], goal[0]) - math.atan2(phys.l2 * math.sin(t2),
                                                   phys.l1 + phys.l2 * math.cos(t2))
    # unwrap t1 toward the current configuration to avoid full-turn swings
    t1 += 2.0 * math.pi * round((theta_now[0] - t1) / (2.0 * math.pi))
    return np.array([t1, t2]), clipped


def make_trajectory(phys: PhysicalParams, state: ArmState, goal,
                    duration: float) -> DesiredTrajectory:
    """Quintic joint-space trajectory from the current angles to the IK
    solution of an end-effector goal, with zero boundary rates."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    goal = np.asarray(goal, dtype=float)
    theta_goal, clipped = _ik_elbow_branch(phys, goal, state.theta_arr())
    return DesiredTrajectory(theta0=state.theta_arr(), theta_goal=theta_goal,
                             t0=state.t, duration=duration, goal_clipped=clipped)
