"""Closest-point geometry between the arm and a point obstacle.

The arm is two line segments.  For the current joint state and an obstacle
position we report the closest arm point, the separation distance d, its
rate d_dot, the unit offset direction from the arm toward the obstacle, and
the translational Jacobian of the closest point with respect to the joint
angles.  Sign convention: d_dot > 0 when the obstacle and arm separate.

Within one control tick the closest point is frozen in (link, arclength);
the switch discontinuity when the closest point jumps between links is
accepted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ArmState, PhysicalParams, forward_kinematics

__all__ = [
    "ObstacleObservation",
    "ProximityReport",
    "closest_point",
    "point_jacobian",
    "proximity_report",
    "ObstacleEstimator",
]


@dataclass(frozen=True)
class ObstacleObservation:
    """Estimated cursor position/velocity plus the ground truth position."""

    pos: tuple[float, float]        # estimated position [m]
    vel: tuple[float, float]        # estimated velocity [m/s]
    pos_true: tuple[float, float]   # ground truth [m]

    def pos_arr(self) -> np.ndarray:
        return np.array(self.pos)

    def vel_arr(self) -> np.ndarray:
        return np.array(self.vel)


@dataclass(frozen=True)
class ProximityReport:
    d: float                      # distance [m]
    d_dot: float                  # separation rate [m/s]
    delta: tuple[float, float]    # unit offset, arm point -> obstacle
    closest_link: int             # 1 or 2
    arclength: float              # closest point position along its link [m]
    jac: np.ndarray               # 2x2 Jacobian of the closest arm point

    def delta_arr(self) -> np.ndarray:
        return np.array(self.delta)


def _segment_closest(a: np.ndarray, b: np.ndarray, p: np.ndarray):
    """Closest point on segment a->b to p; returns (point, arclength, dist)."""
    ab = b - a
    seg_len2 = float(ab @ ab)
    if seg_len2 == 0.0:
        s = 0.0
    else:
        s = float(np.clip((p - a) @ ab / seg_len2, 0.0, 1.0))
    pt = a + s * ab
    return pt, s * math.sqrt(seg_len2), float(np.linalg.norm(p - pt))


def closest_point(phys: PhysicalParams, theta, obstacle_pos):
    """Minimum over both links of point-to-segment distance.

    Returns (point, link_id, arclength, d).  Ties at the elbow go to
    link 2 so the assignment is deterministic.
    """
    p = np.asarray(obstacle_pos, dtype=float)
    base = np.zeros(2)
    elbow, tip = forward_kinematics(phys, theta)
    pt1, s1, d1 = _segment_closest(base, elbow, p)
    pt2, s2, d2 = _segment_closest(elbow, tip, p)
    if d2 <= d1:
        return pt2, 2, s2, d2
    return pt1, 1, s1, d1


def point_jacobian(phys: PhysicalParams, theta, link: int, arclength: float) -> np.ndarray:
    """d(position of the point at `arclength` on `link`)/d(theta)."""
    t1, t2 = theta
    if link == 1:
        if not 0.0 <= arclength <= phys.l1 + 1e-9:
            raise ValueError("arclength outside link 1")
        s = arclength
        return np.array([[-s * math.sin(t1), 0.0],
                         [s * math.cos(t1), 0.0]])
    if link == 2:
        if not 0.0 <= arclength <= phys.l2 + 1e-9:
            raise ValueError("arclength outside link 2")
        s = arclength
        s1, c1 = math.sin(t1), math.cos(t1)
        s12, c12 = math.sin(t1 + t2), math.cos(t1 + t2)
        return np.array([
            [-phys.l1 * s1 - s * s12, -s * s12],
            [phys.l1 * c1 + s * c12, s * c12],
        ])
    raise ValueError(f"unknown link id {link}")


def proximity_report(phys: PhysicalParams, state: ArmState,
                     obstacle: ObstacleObservation,
                     fallback_delta=(1.0, 0.0)) -> ProximityReport:
    """Full proximity picture for one tick.

    d_dot = delta . (v_obstacle - v_armpoint) with v_armpoint = J @ theta_dot
    evaluated at the frozen closest point.  When the obstacle lies exactly
    on the arm (d = 0) the offset direction is unrecoverable; the caller's
    last nonzero direction is used instead and d_dot is computed with it.
    """
    pt, link, s, d = closest_point(phys, state.theta, obstacle.pos_arr())
    if d > 0.0:
        delta = (obstacle.pos_arr() - pt) / d
    else:
        delta = np.asarray(fallback_delta, dtype=float)
        n = np.linalg.norm(delta)
        delta = delta / n if n > 0 else np.array([1.0, 0.0])
    jac = point_jacobian(phys, state.theta, link, s)
    v_point = jac @ state.theta_dot_arr()
    d_dot = float(delta @ (obstacle.vel_arr() - v_point))
    return ProximityReport(d=d, d_dot=d_dot, delta=(float(delta[0]), float(delta[1])),
                           closest_link=link, arclength=s, jac=jac)


class ObstacleEstimator:
    """Noisy cursor observer: bounded uniform position noise and an
    exponentially smoothed finite-difference velocity estimate.

    Deterministic for a given seed.  The first velocity estimate seeds the
    smoother with the raw finite difference, so a zero-noise constant
    velocity stream is recovered exactly.
    """

    def __init__(self, noise_bound: float, dt: float, seed: int,
                 smoothing: float = 0.5):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.noise_bound = float(noise_bound)
        self.dt = float(dt)
        self.smoothing = float(smoothing)
        self._rng = np.random.default_rng(seed)
        self._prev_noisy: np.ndarray | None = None
        self._vel: np.ndarray | None = None

    def observe(self, true_pos) -> ObstacleObservation:
        p = np.asarray(true_pos, dtype=float)
        if self.noise_bound > 0.0:
            noise = self._rng.uniform(-self.noise_bound, self.noise_bound, size=2)
        else:
            noise = np.zeros(2)
        noisy = p + noise
        if self._prev_noisy is None:
            vel = np.zeros(2)
        else:
            fd = (noisy - self._prev_noisy) / self.dt
            if self._vel is None:
                vel = fd
            else:
                lam = self.smoothing
                vel = lam * fd + (1.0 - lam) * self._vel
            self._vel = vel
        self._prev_noisy = noisy
        v = self._vel if self._vel is not None else np.zeros(2)
        return ObstacleObservation(pos=(float(noisy[0]), float(noisy[1])),
                                   vel=(float(v[0]), float(v[1])),
                                   pos_true=(float(p[0]), float(p[1])))
