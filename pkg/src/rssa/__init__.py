"""Safe adaptive control of a planar two-link arm under interval
parametric uncertainty: robust minimum-effort safe-control synthesis over a
discretized parameter family, a Slotine-Li adaptive reference loop, and a
batch/live experiment harness."""

from .dynamics import (ArmState, DEFAULT_PARAMS, PhysicalParams, Torque,
                       XiInterval, XiVector, xi_from_masses, xi_interval)
from .harness import Method, Scenario, TrialRecord, run_trial
from .kernels import BACKEND as KERNEL_BACKEND
from .safe_control import FamilyGrid, SafeDecision, build_family, rssa_control, rssa_step
from .safety_index import SafetyConfig

__version__ = "0.1.0"
