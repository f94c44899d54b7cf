"""Two-link planar manipulator with linear-in-parameter dynamics.

The arm model is gravity-free and friction-free.  Its inertia and Coriolis
terms depend on the joint state only through three lumped inertial
parameters (xi1, xi2, xi3), each monotone in the two link masses.  Interval
bounds on the masses therefore map to an interval box on xi, which is what
the robust controller discretizes.

Convention: M = [[xi1 + 2*xi3*c2, xi2 + xi3*c2], [xi2 + xi3*c2, xi2]] with
c2 = cos(theta2), i.e. xi2 is the distal-link inertia and xi3 carries the
cosine couplings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "PhysicalParams",
    "XiVector",
    "XiInterval",
    "ArmState",
    "Torque",
    "DEFAULT_PARAMS",
    "xi_from_masses",
    "xi_interval",
    "mass_matrix",
    "coriolis_vector",
    "forward_dynamics",
    "step",
    "forward_kinematics",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Link lengths, mass intervals, and ground-truth masses."""

    l1: float  # length of link 1 [m]
    l2: float  # length of link 2 [m]
    m1_lo: float  # mass interval of link 1 [kg]
    m1_hi: float
    m2_lo: float  # mass interval of link 2 [kg]
    m2_hi: float
    m1_true: float  # ground-truth masses [kg]
    m2_true: float

    def __post_init__(self):
        if self.l1 <= 0 or self.l2 <= 0:
            raise ValueError("link lengths must be positive")
        if self.m1_lo > self.m1_hi or self.m2_lo > self.m2_hi:
            raise ValueError("mass interval lower bound exceeds upper bound")
        if not (self.m1_lo <= self.m1_true <= self.m1_hi):
            raise ValueError("true m1 outside its interval")
        if not (self.m2_lo <= self.m2_true <= self.m2_hi):
            raise ValueError("true m2 outside its interval")

    @property
    def reach(self) -> float:
        return self.l1 + self.l2


#: Case-study arm: l1 = 0.25 m, l2 = 0.27 m, m1 in [26.75, 28.75] kg,
#: m2 in [13.30, 14.30] kg.  True masses default to the interval midpoints.
DEFAULT_PARAMS = PhysicalParams(
    l1=0.25, l2=0.27,
    m1_lo=26.75, m1_hi=28.75,
    m2_lo=13.30, m2_hi=14.30,
    m1_true=27.75, m2_true=13.80,
)


@dataclass(frozen=True)
class XiVector:
    """Lumped inertial parameter triple [kg*m^2]."""

    xi1: float
    xi2: float
    xi3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.xi1, self.xi2, self.xi3])

    @staticmethod
    def from_array(a) -> "XiVector":
        return XiVector(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class XiInterval:
    """Componentwise box on the lumped parameters."""

    lo: XiVector
    hi: XiVector

    def __post_init__(self):
        lo, hi = self.lo.as_array(), self.hi.as_array()
        if np.any(lo > hi):
            raise ValueError("xi interval lower bound exceeds upper bound")

    def contains(self, xi: XiVector, atol: float = 1e-12) -> bool:
        a = xi.as_array()
        return bool(np.all(a >= self.lo.as_array() - atol)
                    and np.all(a <= self.hi.as_array() + atol))

    def midpoint(self) -> XiVector:
        return XiVector.from_array(0.5 * (self.lo.as_array() + self.hi.as_array()))

    def clamp(self, xi: np.ndarray) -> np.ndarray:
        return np.clip(xi, self.lo.as_array(), self.hi.as_array())


@dataclass(frozen=True)
class ArmState:
    """Joint angles [rad], joint rates [rad/s] and simulation time [s]."""

    theta: tuple[float, float]
    theta_dot: tuple[float, float]
    t: float = 0.0

    def theta_arr(self) -> np.ndarray:
        return np.array(self.theta)

    def theta_dot_arr(self) -> np.ndarray:
        return np.array(self.theta_dot)


@dataclass(frozen=True)
class Torque:
    """Joint torques [N*m]."""

    tau1: float
    tau2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.tau1, self.tau2])

    @staticmethod
    def from_array(a) -> "Torque":
        return Torque(float(a[0]), float(a[1]))

    def clipped(self, tau_max: float) -> "Torque":
        return Torque(min(max(self.tau1, -tau_max), tau_max),
                      min(max(self.tau2, -tau_max), tau_max))


def xi_from_masses(phys: PhysicalParams, m1: float, m2: float) -> XiVector:
    """Lumped parameters for uniform rods: lc = l/2, I = m*l^2/12.

    xi1 = m1*l1^2/3 + m2*l2^2/3 + m2*l1^2
    xi2 = m2*l2^2/3
    xi3 = m2*l1*l2/2
    """
    if m1 < 0 or m2 < 0:
        raise ValueError("masses must be nonnegative")
    l1, l2 = phys.l1, phys.l2
    xi1 = m1 * l1 ** 2 / 3.0 + m2 * l2 ** 2 / 3.0 + m2 * l1 ** 2
    xi2 = m2 * l2 ** 2 / 3.0
    xi3 = m2 * l1 * l2 / 2.0
    return XiVector(xi1, xi2, xi3)


def xi_interval(phys: PhysicalParams) -> XiInterval:
    """Interval image of xi_from_masses over the mass box.

    Each xi component is monotone increasing in both masses, so the box
    corners give the exact componentwise image.
    """
    lo = xi_from_masses(phys, phys.m1_lo, phys.m2_lo)
    hi = xi_from_masses(phys, phys.m1_hi, phys.m2_hi)
    return XiInterval(lo, hi)


def mass_matrix(xi: XiVector, theta2: float) -> np.ndarray:
    """Symmetric joint-space inertia matrix at elbow angle theta2."""
    c2 = math.cos(theta2)
    m11 = xi.xi1 + 2.0 * xi.xi3 * c2
    m12 = xi.xi2 + xi.xi3 * c2
    return np.array([[m11, m12], [m12, xi.xi2]])


def coriolis_vector(xi: XiVector, theta2: float, theta_dot) -> np.ndarray:
    """Velocity-product term h such that M @ theta_ddot + h = tau."""
    s2 = math.sin(theta2)
    td1, td2 = theta_dot
    return np.array([
        xi.xi3 * s2 * (-2.0 * td1 * td2 - td2 ** 2),
        xi.xi3 * s2 * td1 ** 2,
    ])


def coriolis_matrix(xi: XiVector, theta2: float, theta_dot) -> np.ndarray:
    """Christoffel-form C with C @ theta_dot = coriolis_vector."""
    s2 = math.sin(theta2)
    td1, td2 = theta_dot
    return xi.xi3 * s2 * np.array([[-td2, -(td1 + td2)], [td1, 0.0]])


def forward_dynamics(xi: XiVector, s: ArmState, tau: Torque) -> np.ndarray:
    """Joint accelerations theta_ddot = M^-1 (tau - h)."""
    M = mass_matrix(xi, s.theta[1])
    h = coriolis_vector(xi, s.theta[1], s.theta_dot)
    acc = np.linalg.solve(M, tau.as_array() - h)
    if not np.all(np.isfinite(acc)):
        raise FloatingPointError("non-finite joint acceleration")
    return acc


def step(xi_true: XiVector, s: ArmState, tau: Torque, dt: float) -> ArmState:
    """Semi-implicit Euler step: update rates first, then angles."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    acc = forward_dynamics(xi_true, s, tau)
    td = s.theta_dot_arr() + dt * acc
    th = s.theta_arr() + dt * td
    if not (np.all(np.isfinite(td)) and np.all(np.isfinite(th))):
        raise FloatingPointError("integration diverged")
    return ArmState(theta=(float(th[0]), float(th[1])),
                    theta_dot=(float(td[0]), float(td[1])),
                    t=s.t + dt)


def forward_kinematics(phys: PhysicalParams, theta) -> tuple[np.ndarray, np.ndarray]:
    """Positions of the elbow (joint 2) and the end effector [m]."""
    t1, t2 = theta
    elbow = phys.l1 * np.array([math.cos(t1), math.sin(t1)])
    tip = elbow + phys.l2 * np.array([math.cos(t1 + t2), math.sin(t1 + t2)])
    return elbow, tip


def kinetic_energy(xi: XiVector, s: ArmState) -> float:
    td = s.theta_dot_arr()
    return 0.5 * float(td @ mass_matrix(xi, s.theta[1]) @ td)
