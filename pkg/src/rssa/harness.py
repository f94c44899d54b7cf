"""Trial execution, method definitions, metrics, and batch runs.

A Scenario bundles everything a trial needs: the arm, the uncertainty box,
the safety configuration, the robot goal sequence, and the cursor track.
Methods differ in which parameter model feeds the safety filter and which
safety index activates it:

  NO_OBSTACLE  adaptive tracking, safety filter disabled
  M0           frozen random estimate + base index, half-space baseline
  M1           adaptive estimate + base index, half-space baseline
  M2           adaptive estimate + robust index, half-space baseline
  M3           family grid + base index, robust minimum-effort override
  M4           family grid + robust index, robust minimum-effort override

Metrics follow GOAL / VIOL / DIST / AVG_DIST: goals reached, down-crossings
of the minimum safe distance (measured on the ground-truth cursor), and the
minimum and mean separation.  Everything is deterministic per seed.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from . import safety_index as si
from .adaptive import (AdaptGains, DesiredTrajectory, EstimatorState,
                       make_trajectory, reference_control, update_estimate)
from .dynamics import (ArmState, PhysicalParams, Torque, XiInterval, XiVector,
                       forward_kinematics, step, xi_from_masses, xi_interval)
from .proximity import ObstacleEstimator, proximity_report
from .safe_control import (DecisionMode, FamilyGrid, baseline_safe_control,
                           build_family, feasibility, rssa_step)
from .safety_index import SafetyConfig, lie_derivatives, family_lie_derivatives

__all__ = [
    "Method",
    "HumanTrack",
    "Scenario",
    "TrialRecord",
    "run_trial",
    "violation_count",
    "batch",
    "write_batch_csv",
    "load_scenario",
    "bundled_scenario_paths",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ["trial", "method", "GOAL", "VIOL", "DIST", "AVG_DIST",
               "clipped_ticks", "infeasible_ticks"]


class Method(str, Enum):
    NO_OBSTACLE = "NO_OBSTACLE"
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    M4 = "M4"

    @property
    def filtered(self) -> bool:
        return self is not Method.NO_OBSTACLE

    @property
    def frozen_estimate(self) -> bool:
        return self is Method.M0

    @property
    def uses_family_grid(self) -> bool:
        return self in (Method.M3, Method.M4)

    @property
    def robust_index(self) -> bool:
        return self in (Method.M2, Method.M4)


@dataclass(frozen=True)
class HumanTrack:
    """Cursor motion: either scripted goal pursuit or a recorded sample
    stream at the scenario tick rate."""

    mode: str                                   # "scripted" | "recorded"
    start: tuple[float, float] = (0.6, 0.6)
    goals: tuple[tuple[float, float], ...] = ()
    natural_freq: float = 3.0                   # pursuit stiffness [rad/s]
    goal_radius: float = 0.05
    positions: np.ndarray | None = None         # (n, 2) for recorded mode

    def synthesize(self, dt: float, n_steps: int) -> np.ndarray:
        """Ground-truth cursor positions for ticks 0..n_steps."""
        if self.mode == "recorded":
            if self.positions is None or len(self.positions) < n_steps + 1:
                raise ValueError("recorded track shorter than the trial")
            return np.asarray(self.positions, float)[: n_steps + 1]
        if self.mode != "scripted":
            raise ValueError(f"unknown human track mode {self.mode!r}")
        # critically damped pursuit of sequential goals
        wn = self.natural_freq
        p = np.array(self.start, float)
        v = np.zeros(2)
        goals = [np.array(g, float) for g in self.goals] or [p.copy()]
        gi = 0
        out = np.empty((n_steps + 1, 2))
        out[0] = p
        for k in range(1, n_steps + 1):
            g = goals[gi]
            if np.linalg.norm(p - g) < self.goal_radius and gi + 1 < len(goals):
                gi += 1
                g = goals[gi]
            a = wn * wn * (g - p) - 2.0 * wn * v
            v = v + dt * a
            p = p + dt * v
            out[k] = p
        return out


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    phys: PhysicalParams
    safety: SafetyConfig
    gains: AdaptGains = field(default_factory=AdaptGains)
    dt: float = 0.01
    max_steps: int = 1000
    goal_radius: float = 0.05
    tau_max: float = 20.0
    noise_bound: float = 0.01
    grid_resolution: int = 3
    initial_theta: tuple[float, float] = (0.0, 1.2)
    initial_theta_dot: tuple[float, float] = (0.0, 0.0)
    robot_goals: tuple[tuple[float, float], ...] = ()
    human: HumanTrack = field(default_factory=lambda: HumanTrack(mode="scripted"))

    def __post_init__(self):
        if self.max_steps < 1 or self.dt <= 0:
            raise ValueError("max_steps >= 1 and dt > 0 required")
        if not self.robot_goals:
            raise ValueError("scenario needs at least one robot goal")

    def xi_true(self) -> XiVector:
        return xi_from_masses(self.phys, self.phys.m1_true, self.phys.m2_true)

    def interval(self) -> XiInterval:
        return xi_interval(self.phys)


@dataclass
class TrialRecord:
    scenario: str
    method: str
    # per-tick series
    t: np.ndarray
    theta: np.ndarray          # (n, 2)
    theta_dot: np.ndarray      # (n, 2)
    u_ref: np.ndarray          # (n, 2)
    u: np.ndarray              # (n, 2)
    mode: list[str]
    d: np.ndarray              # ground-truth separation
    d_observed: np.ndarray
    phi: np.ndarray
    phi_alpha: np.ndarray
    xi_hat: np.ndarray         # (n, 3)
    cursor: np.ndarray         # (n, 2) ground-truth cursor positions
    # summary
    goals_reached: int = 0
    violations: int = 0
    min_distance: float = math.inf
    avg_distance: float = math.inf
    clipped_ticks: int = 0
    infeasible_ticks: int = 0
    goal_clip_flagged: bool = False
    aborted: str | None = None

    def metrics_row(self) -> dict:
        return {
            "trial": self.scenario,
            "method": self.method,
            "GOAL": self.goals_reached,
            "VIOL": self.violations,
            "DIST": self.min_distance,
            "AVG_DIST": self.avg_distance,
            "clipped_ticks": self.clipped_ticks,
            "infeasible_ticks": self.infeasible_ticks,
        }


def violation_count(d_series, d_min: float) -> int:
    """Number of down-crossings of d_min; an initial breach counts once."""
    d = np.asarray(d_series, float)
    if len(d) == 0:
        raise ValueError("empty distance series")
    below = d < d_min
    entries = below & np.concatenate(([True], ~below[:-1]))
    return int(entries.sum())


def _goal_duration(dtheta: np.ndarray) -> float:
    # pace the quintic so the peak joint rate stays moderate
    return float(np.clip(np.linalg.norm(dtheta) / 0.8, 1.0, 3.5))


class TrialAbort(Exception):
    """Raised from a cursor source or tick hook to end a trial early."""


def run_trial(scenario: Scenario, method: Method,
              cursor_track: np.ndarray | None = None,
              cursor_source=None,
              on_tick=None) -> TrialRecord:
    """Execute one trial of `method` on `scenario`.

    `cursor_track` overrides the scenario's human track (used for live
    session replay); `cursor_source(k)` supplies the cursor online instead
    (live sessions).  `on_tick(k, state, frame)` is an optional hook used
    by the live server; it must not mutate anything.  Either callback may
    raise TrialAbort to end the trial early with a partial record.
    """
    cfg = scenario.safety
    phys = scenario.phys
    gains = scenario.gains
    interval = scenario.interval()
    xi_true = scenario.xi_true()
    dt = scenario.dt
    n = scenario.max_steps

    if cursor_source is None:
        if cursor_track is None:
            cursor_track = scenario.human.synthesize(dt, n)
        else:
            cursor_track = np.asarray(cursor_track, float)
            if len(cursor_track) < n:
                raise ValueError("cursor track shorter than the trial")

    # deterministic randomness: one stream for the frozen draw, one for the
    # observation noise
    frozen_rng = np.random.default_rng(scenario.seed + 1)
    frozen_xi = XiVector.from_array(frozen_rng.uniform(
        interval.lo.as_array(), interval.hi.as_array()))
    estimator = ObstacleEstimator(scenario.noise_bound, dt, scenario.seed)

    if method.frozen_estimate:
        est = EstimatorState(xi_hat=frozen_xi, interval=interval)
    else:
        est = EstimatorState(xi_hat=interval.midpoint(), interval=interval)

    grid = build_family(interval, scenario.grid_resolution) if method.uses_family_grid else None

    state = ArmState(theta=scenario.initial_theta,
                     theta_dot=scenario.initial_theta_dot, t=0.0)
    goals = [np.array(g, float) for g in scenario.robot_goals]
    goal_idx = 0
    traj = make_trajectory(phys, state, goals[goal_idx],
                           _goal_duration(np.array(goals[goal_idx])))
    goal_clip_flagged = traj.goal_clipped
    goals_reached = 0
    last_delta = (1.0, 0.0)

    rows = {k: [] for k in ("t", "theta", "theta_dot", "u_ref", "u", "mode",
                            "d", "d_observed", "phi", "phi_alpha", "xi_hat",
                            "cursor")}
    clipped_ticks = 0
    infeasible_ticks = 0
    aborted = None

    for k in range(n):
        try:
            if cursor_source is not None:
                true_pos = np.asarray(cursor_source(k), float)
            else:
                true_pos = cursor_track[k]
        except TrialAbort:
            aborted = f"aborted by cursor source at tick {k}"
            break
        obs = estimator.observe(true_pos)
        prox = proximity_report(phys, state, obs, fallback_delta=last_delta)
        if prox.d > 0:
            last_delta = prox.delta

        # goal management: advance when the tip is inside the goal disc
        _, tip = forward_kinematics(phys, state.theta)
        if np.linalg.norm(tip - goals[goal_idx]) < scenario.goal_radius:
            goals_reached += 1
            goal_idx = (goal_idx + 1) % len(goals)
            traj = make_trajectory(phys, state, goals[goal_idx],
                                   _goal_duration(goals[goal_idx] - tip))
            goal_clip_flagged |= traj.goal_clipped

        u_r, s_var, y = reference_control(gains, traj, state, est)
        if not method.frozen_estimate:
            est = update_estimate(gains, est, y, s_var, dt)

        phi_val = si.phi(cfg, prox)
        if method.robust_index:
            pa = si.phi_alpha(cfg, est.xi_hat, interval)
            pa_dot = si.phi_alpha_dot(cfg, est.xi_hat, est.xi_hat_dot, interval)
        else:
            pa = 0.0
            pa_dot = 0.0
        eta = si.eta_t(cfg, phi_val + pa, pa_dot)

        mode = DecisionMode.REFERENCE_PASSED
        u = u_r
        if method.filtered:
            try:
                if method.uses_family_grid:
                    lf, lg = family_lie_derivatives(cfg, phys, state, prox, obs,
                                                    grid.samples)
                    decision = rssa_step(grid.with_derivatives(lf, lg), u_r,
                                         phi_val + pa, eta)
                    u, mode = decision.u, decision.mode
                    if mode is DecisionMode.INFEASIBLE_FALLBACK:
                        infeasible_ticks += 1
                else:
                    lf_hat, lg_hat = lie_derivatives(cfg, phys, state, prox, obs,
                                                     est.xi_hat)
                    u, overridden, feas = baseline_safe_control(u_r, lf_hat,
                                                                lg_hat, eta)
                    if overridden:
                        mode = DecisionMode.BASELINE_OVERRIDE
                    if not feas:
                        infeasible_ticks += 1
            except si.CollisionError:
                # obstacle exactly on the arm: nothing sensible to filter
                u, mode = u_r, DecisionMode.REFERENCE_PASSED

        u_clipped = u.clipped(scenario.tau_max)
        if u_clipped != u:
            clipped_ticks += 1

        d_true = float(np.linalg.norm(true_pos - _closest_arm_point(phys, state, true_pos)))
        rows["t"].append(state.t)
        rows["theta"].append(state.theta)
        rows["theta_dot"].append(state.theta_dot)
        rows["u_ref"].append((u_r.tau1, u_r.tau2))
        rows["u"].append((u_clipped.tau1, u_clipped.tau2))
        rows["mode"].append(mode.value)
        rows["d"].append(d_true)
        rows["d_observed"].append(prox.d)
        rows["phi"].append(phi_val)
        rows["phi_alpha"].append(pa)
        rows["xi_hat"].append(tuple(est.xi_hat.as_array()))
        rows["cursor"].append(tuple(true_pos))

        if on_tick is not None:
            try:
                on_tick(k, state, {
                    "d": d_true, "phi": phi_val, "mode": mode.value,
                    "cursor": tuple(true_pos), "goals": goals_reached,
                })
            except TrialAbort:
                aborted = f"aborted by tick hook at tick {k}"
                break

        try:
            state = step(xi_true, state, u_clipped, dt)
        except FloatingPointError as exc:
            aborted = f"numerical blow-up at tick {k}: {exc}"
            break

    d_arr = np.array(rows["d"])
    have_ticks = len(d_arr) > 0
    record = TrialRecord(
        scenario=scenario.name, method=method.value,
        t=np.array(rows["t"]), theta=np.array(rows["theta"]),
        theta_dot=np.array(rows["theta_dot"]), u_ref=np.array(rows["u_ref"]),
        u=np.array(rows["u"]), mode=rows["mode"], d=d_arr,
        d_observed=np.array(rows["d_observed"]), phi=np.array(rows["phi"]),
        phi_alpha=np.array(rows["phi_alpha"]), xi_hat=np.array(rows["xi_hat"]),
        cursor=np.array(rows["cursor"]),
        goals_reached=goals_reached,
        violations=violation_count(d_arr, cfg.d_min) if have_ticks else 0,
        min_distance=float(d_arr.min()) if have_ticks else math.nan,
        avg_distance=float(d_arr.mean()) if have_ticks else math.nan,
        clipped_ticks=clipped_ticks,
        infeasible_ticks=infeasible_ticks,
        goal_clip_flagged=goal_clip_flagged,
        aborted=aborted,
    )
    return record


def _closest_arm_point(phys: PhysicalParams, state: ArmState, pos: np.ndarray) -> np.ndarray:
    from .proximity import closest_point
    pt, _, _, _ = closest_point(phys, state.theta, pos)
    return pt


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def write_batch_csv(rows: list[dict], out) -> None:
    """Fixed column order, 9-significant-digit floats, byte deterministic."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def batch(scenarios: list[Scenario], methods: list[Method]) -> list[dict]:
    """One metrics row per (scenario, method); failures recorded per row."""
    rows = []
    for sc in scenarios:
        for m in methods:
            try:
                rec = run_trial(sc, m)
                row = rec.metrics_row()
                if rec.aborted:
                    row["method"] = f"{row['method']}!aborted"
            except Exception as exc:  # keep the batch going
                row = {"trial": sc.name, "method": f"{m.value}!error:{exc}",
                       "GOAL": -1, "VIOL": -1, "DIST": math.nan,
                       "AVG_DIST": math.nan, "clipped_ticks": -1,
                       "infeasible_ticks": -1}
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# scenario (de)serialization


def load_scenario(path) -> Scenario:
    """Load a scenario JSON file (schema documented in the README)."""
    data = json.loads(Path(path).read_text())
    return scenario_from_dict(data)


def scenario_from_dict(data: dict) -> Scenario:
    phys_d = data["physical"]
    phys = PhysicalParams(
        l1=phys_d["l1_m"], l2=phys_d["l2_m"],
        m1_lo=phys_d["m1_range_kg"][0], m1_hi=phys_d["m1_range_kg"][1],
        m2_lo=phys_d["m2_range_kg"][0], m2_hi=phys_d["m2_range_kg"][1],
        m1_true=phys_d["m1_true_kg"], m2_true=phys_d["m2_true_kg"],
    )
    saf = data.get("safety", {})
    cfg = SafetyConfig.for_interval(
        xi_interval(phys),
        d_min=saf.get("d_min_m", 0.15),
        k1=saf.get("k1", 0.01),
        k_xi=saf.get("k_xi", 20.0),
        eta0=saf.get("eta0", 0.1),
    )
    gains_d = data.get("gains", {})
    gains = AdaptGains(
        kd=gains_d.get("kd", 5.0) * np.eye(2),
        lam=gains_d.get("lambda", 1.0) * np.eye(2),
        gamma=np.diag(gains_d.get("gamma", [60.0, 100.0, 20.0])),
    )
    human_d = data["human"]
    if human_d["mode"] == "recorded":
        human = HumanTrack(mode="recorded",
                           positions=np.asarray(human_d["positions_m"], float))
    else:
        human = HumanTrack(
            mode="scripted",
            start=tuple(human_d["start_m"]),
            goals=tuple(tuple(g) for g in human_d["goals_m"]),
            natural_freq=human_d.get("natural_freq_rad_s", 3.0),
            goal_radius=human_d.get("goal_radius_m", 0.05),
        )
    return Scenario(
        name=data["name"],
        seed=data["seed"],
        phys=phys,
        safety=cfg,
        gains=gains,
        dt=data.get("dt_s", 0.01),
        max_steps=data.get("max_steps", 1000),
        goal_radius=data.get("goal_radius_m", 0.05),
        tau_max=data.get("tau_max_Nm", 20.0),
        noise_bound=data.get("noise_bound_m", 0.01),
        grid_resolution=saf.get("grid_resolution", 3),
        initial_theta=tuple(data.get("initial_theta_rad", (0.0, 1.2))),
        initial_theta_dot=tuple(data.get("initial_theta_dot_rad_s", (0.0, 0.0))),
        robot_goals=tuple(tuple(g) for g in data["robot_goals_m"]),
        human=human,
    )


def bundled_scenario_paths() -> list[Path]:
    """The three scripted trials shipped with the package."""
    root = Path(__file__).parent / "scenarios"
    return sorted(root.glob("trial*.json"))
