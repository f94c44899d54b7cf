"""Safety index, uncertainty penalty, and Lie derivatives.

The base index is phi = d_min^2 - d^2 - k1 * d_dot; the robust index adds
a quadratic penalty phi_alpha on the deviation of the parameter estimate
from the interval midpoint.  The constraint phi_dot <= -eta(t) is imposed
through the effective margin eta(t), which is the unconstrained sentinel
-inf while phi + phi_alpha < 0.

Control enters phi_dot only through the d_ddot term, which splits as

    d_ddot = d_ddot_kin - delta^T J theta_ddot,

where d_ddot_kin is the xi-independent part (obstacle and arm coasting at
their current velocities).  d_ddot_kin is obtained by a central finite
difference of d_dot under that frozen-velocity flow, which captures the
sliding of the closest point along the link; the xi-dependent part is in
closed form per family member:

    Lg(xi) = k1 * (delta^T J) M(xi)^-1
    Lf(xi) = -2 d d_dot - k1 * d_ddot_kin - Lg(xi) @ h(xi)

Obstacle acceleration is taken as zero (not observable from the noisy
cursor).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dynamics import ArmState, PhysicalParams, XiInterval, XiVector
from .proximity import ObstacleObservation, ProximityReport, closest_point, point_jacobian

__all__ = [
    "SafetyConfig",
    "SafetyEval",
    "CollisionError",
    "phi0",
    "phi",
    "phi_alpha",
    "phi_alpha_dot",
    "kinematic_d_ddot",
    "lie_derivatives",
    "family_lie_derivatives",
    "eta_t",
]

NO_CONSTRAINT = float("-inf")


class CollisionError(RuntimeError):
    """Obstacle exactly on the arm; Lie derivatives are undefined."""


@dataclass(frozen=True)
class SafetyConfig:
    d_min: float = 0.15      # minimum safe distance [m]
    k1: float = 0.01         # rate gain [m*s]
    k_xi: float = 20.0       # uncertainty gain
    eta0: float = 0.1        # base margin
    xi_weight: np.ndarray = field(default_factory=lambda: np.eye(3), compare=False)
    fd_step: float = 1e-6    # finite-difference step for the kinematic d_ddot

    def __post_init__(self):
        if self.d_min <= 0 or self.k1 <= 0 or self.k_xi < 0:
            raise ValueError("d_min and k1 must be positive, k_xi nonnegative")
        w = np.asarray(self.xi_weight, dtype=float)
        if w.shape != (3, 3) or not np.allclose(w, w.T):
            raise ValueError("xi_weight must be symmetric 3x3")
        if np.any(np.linalg.eigvalsh(w) <= 0):
            raise ValueError("xi_weight must be positive definite")
        object.__setattr__(self, "xi_weight", w)

    @staticmethod
    def for_interval(interval: XiInterval, **kwargs) -> "SafetyConfig":
        """Weight each parameter by the inverse square of its interval span
        and normalize so the worst-case penalty equals d_min**2.

        The penalty then inflates the guarded boundary by at most a factor
        sqrt(2) in distance and, crucially, stays on the same scale as the
        distance index: the composite index cannot activate far from the
        obstacle, where the control authority over the distance vanishes.
        """
        probe = SafetyConfig(**kwargs)
        span = interval.hi.as_array() - interval.lo.as_array()
        # degenerate axes carry no uncertainty; any positive weight keeps SPD
        w = np.where(span > 0.0, span, 1.0) ** -2.0
        cap = 2.0 * probe.d_min ** 2 / (probe.k_xi * float(np.count_nonzero(span > 0.0)) or 1.0)
        return SafetyConfig(xi_weight=np.diag(cap * w), **kwargs)


@dataclass(frozen=True)
class SafetyEval:
    """Per-tick safety picture for one family of xi samples."""

    phi0: float
    phi: float
    phi_alpha: float
    phi_alpha_dot: float
    lf: np.ndarray            # (n,) drift Lie derivative per sample
    lg: np.ndarray            # (n, 2) control Lie derivative per sample
    eta_t: float

    @property
    def phi_robust(self) -> float:
        return self.phi + self.phi_alpha


def phi0(cfg: SafetyConfig, prox: ProximityReport) -> float:
    """Distance-only part of the index."""
    return cfg.d_min ** 2 - prox.d ** 2


def phi(cfg: SafetyConfig, prox: ProximityReport) -> float:
    return cfg.d_min ** 2 - prox.d ** 2 - cfg.k1 * prox.d_dot


def phi_alpha(cfg: SafetyConfig, xi_hat: XiVector, interval: XiInterval) -> float:
    """Nonnegative quadratic penalty on estimate-vs-midpoint deviation."""
    dxi = interval.midpoint().as_array() - xi_hat.as_array()
    val = cfg.k_xi * float(dxi @ cfg.xi_weight @ dxi)
    assert val >= 0.0
    return val


def phi_alpha_dot(cfg: SafetyConfig, xi_hat: XiVector, xi_hat_dot: np.ndarray,
                  interval: XiInterval) -> float:
    """Analytic time derivative of phi_alpha along the estimator."""
    dxi = interval.midpoint().as_array() - xi_hat.as_array()
    return -2.0 * cfg.k_xi * float(dxi @ cfg.xi_weight @ np.asarray(xi_hat_dot))


def _d_dot_at(phys: PhysicalParams, theta, theta_dot, obs_pos, obs_vel) -> float:
    pt, link, s, d = closest_point(phys, theta, obs_pos)
    if d == 0.0:
        raise CollisionError("obstacle on the arm during finite differencing")
    delta = (obs_pos - pt) / d
    jac = point_jacobian(phys, theta, link, s)
    return float(delta @ (obs_vel - jac @ theta_dot))


def kinematic_d_ddot(cfg: SafetyConfig, phys: PhysicalParams, state: ArmState,
                     obs: ObstacleObservation) -> float:
    """Central finite difference of d_dot under frozen-velocity flow.

    The closest point is re-found at the displaced configurations, so the
    sliding of the foot point along the link is captured.  Invalid near a
    link-switch event, where d(t) is nonsmooth.
    """
    h = cfg.fd_step
    th = state.theta_arr()
    td = state.theta_dot_arr()
    p = obs.pos_arr()
    v = obs.vel_arr()
    plus = _d_dot_at(phys, th + h * td, td, p + h * v, v)
    minus = _d_dot_at(phys, th - h * td, td, p - h * v, v)
    return (plus - minus) / (2.0 * h)


def _family_base(cfg: SafetyConfig, phys: PhysicalParams, state: ArmState,
                 prox: ProximityReport, obs: ObstacleObservation):
    if prox.d == 0.0:
        raise CollisionError("obstacle on the arm; Lie derivatives undefined")
    base = -2.0 * prox.d * prox.d_dot - cfg.k1 * kinematic_d_ddot(cfg, phys, state, obs)
    v = prox.delta_arr() @ prox.jac
    return base, v


def family_lie_derivatives(cfg: SafetyConfig, phys: PhysicalParams, state: ArmState,
                           prox: ProximityReport, obs: ObstacleObservation,
                           samples: np.ndarray):
    """(Lf, Lg) arrays over a (n, 3) array of xi samples."""
    base, v = _family_base(cfg, phys, state, prox, obs)
    samples = np.ascontiguousarray(samples, dtype=float)
    return kernels.family_lie(samples, math.cos(state.theta[1]), math.sin(state.theta[1]),
                              state.theta_dot[0], state.theta_dot[1],
                              float(v[0]), float(v[1]), cfg.k1, base)


def lie_derivatives(cfg: SafetyConfig, phys: PhysicalParams, state: ArmState,
                    prox: ProximityReport, obs: ObstacleObservation,
                    xi_sample: XiVector):
    """Single-sample (Lf, Lg) so that phi_dot = Lf + Lg @ tau."""
    lf, lg = family_lie_derivatives(cfg, phys, state, prox, obs,
                                    xi_sample.as_array()[None, :])
    return float(lf[0]), lg[0]


def eta_t(cfg: SafetyConfig, phi_plus_alpha: float, phi_alpha_dot_val: float) -> float:
    """Effective margin: eta0 + phi_alpha_dot while the composite index is
    active, else the -inf sentinel (constraint inactive)."""
    if phi_plus_alpha < 0.0:
        return NO_CONSTRAINT
    return cfg.eta0 + phi_alpha_dot_val
