"""Robust safe-control synthesis over a discretized parameter family.

Given the drift and control Lie derivatives of the safety index for every
sample of the parameter box, this module decides whether the reference
torque is safe for the whole family and, if not, synthesizes the
minimum-effort override:

  * the maximin selection of the steering member g* and its worst-case
    alignment alpha*,
  * the override u = -((max_i Lf_i + eta(t)) / alpha*) * Lg*,
  * the single-estimate baseline that projects the reference onto one
    half-space in a Q-metric.

The family is a tensor grid over the xi interval (corners dominate because
the Lie derivatives are monotone in each parameter; the midpoint anchors
alpha*).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .dynamics import Torque, XiInterval, XiVector

__all__ = [
    "FamilyGrid",
    "FeasibilityCert",
    "DecisionMode",
    "SafeDecision",
    "build_family",
    "feasibility",
    "robust_set_contains",
    "solve_g_star",
    "rssa_control",
    "baseline_safe_control",
    "rssa_step",
    "InfeasibleFamilyError",
]


class InfeasibleFamilyError(RuntimeError):
    """No single direction can satisfy every family member."""


@dataclass(frozen=True)
class FamilyGrid:
    """Discretized parameter family with cached Lie derivatives."""

    samples: np.ndarray           # (n, 3) xi samples
    lf: np.ndarray | None = None  # (n,) drift Lie derivatives
    lg: np.ndarray | None = None  # (n, 2) control Lie derivatives

    def __post_init__(self):
        if len(self.samples) == 0:
            raise ValueError("family grid must be nonempty")

    def with_derivatives(self, lf: np.ndarray, lg: np.ndarray) -> "FamilyGrid":
        if len(lf) != len(self.samples) or lg.shape != (len(self.samples), 2):
            raise ValueError("Lie derivative shapes do not match the grid")
        return FamilyGrid(samples=self.samples, lf=np.asarray(lf, float),
                          lg=np.asarray(lg, float))

    def _require(self):
        if self.lf is None or self.lg is None:
            raise ValueError("Lie derivatives not attached to this grid")


@dataclass(frozen=True)
class FeasibilityCert:
    alpha: float   # worst pairwise cosine between control Lie derivatives
    beta: float    # smallest control Lie derivative norm

    @property
    def feasible(self) -> bool:
        return self.alpha > 0.0 and self.beta > 0.0


class DecisionMode(str, Enum):
    REFERENCE_PASSED = "reference-passed"
    RSSA_OVERRIDE = "rssa-override"
    BASELINE_OVERRIDE = "baseline-override"
    INFEASIBLE_FALLBACK = "infeasible-fallback"


@dataclass(frozen=True)
class SafeDecision:
    u: Torque
    mode: DecisionMode
    g_star_index: int | None = None
    alpha_star: float | None = None


def build_family(interval: XiInterval, resolution: int = 3) -> FamilyGrid:
    """Tensor grid with `resolution` points per axis (duplicates removed, so
    a point interval collapses to a single sample)."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per axis")
    lo = interval.lo.as_array()
    hi = interval.hi.as_array()
    axes = [np.linspace(lo[k], hi[k], resolution) for k in range(3)]
    pts = np.array(list(itertools.product(*axes)))
    _, first = np.unique(pts, axis=0, return_index=True)
    return FamilyGrid(samples=pts[np.sort(first)])


def feasibility(grid: FamilyGrid) -> FeasibilityCert:
    """Certificate (alpha, beta); feasible iff both strictly positive."""
    grid._require()
    alpha, beta = kernels.feasibility_bounds(np.ascontiguousarray(grid.lg))
    return FeasibilityCert(alpha=alpha, beta=beta)


def robust_set_contains(u, grid: FamilyGrid, eta_t_val: float,
                        tol: float = 0.0) -> bool:
    """True iff Lf_i + Lg_i @ u <= -eta(t) for every sample.  The -inf
    sentinel makes the set the whole control space."""
    if eta_t_val == float("-inf"):
        return True
    grid._require()
    u_arr = u.as_array() if isinstance(u, Torque) else np.asarray(u, float)
    lhs = grid.lf + grid.lg @ u_arr
    return bool(np.all(lhs <= -eta_t_val + tol))


def solve_g_star(grid: FamilyGrid) -> tuple[int, float]:
    """Exhaustive maximin over grid samples; ties resolve to the lowest
    index.  Raises InfeasibleFamilyError if every sample has zero control
    authority."""
    grid._require()
    try:
        return kernels.solve_g_star(np.ascontiguousarray(grid.lg))
    except ValueError as exc:
        raise InfeasibleFamilyError(str(exc)) from exc


def rssa_control(grid: FamilyGrid, eta_t_val: float) -> tuple[Torque, int, float]:
    """Minimum-effort robust override.

    With Lf_max the family worst-case drift term: u = 0 when
    Lf_max + eta(t) <= 0, otherwise u = -((Lf_max + eta(t)) / alpha*) Lg*.
    Returns (u, g_star_index, alpha_star).
    """
    grid._require()
    idx, alpha_star = solve_g_star(grid)
    lf_max = float(grid.lf.max())
    if lf_max + eta_t_val <= 0.0:
        return Torque(0.0, 0.0), idx, alpha_star
    if alpha_star <= 0.0:
        raise InfeasibleFamilyError(
            f"worst-case alignment alpha*={alpha_star:.3g} is not positive")
    u = -((lf_max + eta_t_val) / alpha_star) * grid.lg[idx]
    return Torque.from_array(u), idx, alpha_star


def baseline_safe_control(u_r: Torque, lf_hat: float, lg_hat: np.ndarray,
                          eta_t_val: float, q: np.ndarray | None = None):
    """Single-estimate safe control: keep u_r if it already satisfies
    lg_hat @ u <= -eta(t) - lf_hat, else project onto that half-space in the
    Q-metric (closed form).  Returns (u, overridden, feasible)."""
    if eta_t_val == float("-inf"):
        return u_r, False, True
    a = np.asarray(lg_hat, float)
    b = -eta_t_val - lf_hat
    u0 = u_r.as_array()
    if float(a @ u0) <= b:
        return u_r, False, True
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        # no feasible direction; the baseline has no guarantee here
        return u_r, False, False
    if q is None:
        step = a * (float(a @ u0) - b) / (norm * norm)
    else:
        qinv_a = np.linalg.solve(np.asarray(q, float), a)
        step = qinv_a * (float(a @ u0) - b) / float(a @ qinv_a)
    return Torque.from_array(u0 - step), True, True


def _worst_sample_fallback(u_r: Torque, grid: FamilyGrid, eta_t_val: float) -> Torque:
    """Project the reference against the most violated sample's half-space.
    No robustness guarantee; used only when the certificate fails."""
    violation = grid.lf + grid.lg @ u_r.as_array() + eta_t_val
    worst = int(np.argmax(violation))
    u, _, _ = baseline_safe_control(u_r, float(grid.lf[worst]), grid.lg[worst],
                                    eta_t_val)
    return u


def rssa_step(grid: FamilyGrid, u_r: Torque, phi_plus_alpha: float,
              eta_t_val: float) -> SafeDecision:
    """One pass of the robust safe set decision logic.

    The reference passes untouched while the composite index is inactive or
    already robust-safe; otherwise the minimum-effort override fires.  An
    infeasible certificate falls back to projecting against the worst-case
    sample and is flagged through the mode.
    """
    if phi_plus_alpha <= 0.0:
        return SafeDecision(u=u_r, mode=DecisionMode.REFERENCE_PASSED)
    if robust_set_contains(u_r, grid, eta_t_val):
        return SafeDecision(u=u_r, mode=DecisionMode.REFERENCE_PASSED)
    cert = feasibility(grid)
    if not cert.feasible:
        return SafeDecision(u=_worst_sample_fallback(u_r, grid, eta_t_val),
                            mode=DecisionMode.INFEASIBLE_FALLBACK)
    try:
        u, idx, alpha_star = rssa_control(grid, eta_t_val)
    except InfeasibleFamilyError:
        return SafeDecision(u=_worst_sample_fallback(u_r, grid, eta_t_val),
                            mode=DecisionMode.INFEASIBLE_FALLBACK)
    return SafeDecision(u=u, mode=DecisionMode.RSSA_OVERRIDE,
                        g_star_index=idx, alpha_star=alpha_star)
