"""Command line interface: single runs, batches, feasibility sweeps, and
the live websocket session."""
from __future__ import annotations

import dataclasses
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import kernels
from .harness import (CSV_COLUMNS, Method, Scenario, batch as run_batch,
                      bundled_scenario_paths, load_scenario, run_trial,
                      write_batch_csv)
from .proximity import point_jacobian
from .safe_control import build_family, feasibility


def _apply_overrides(sc: Scenario, seed, dt, steps) -> Scenario:
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if dt is not None:
        changes["dt"] = dt
    if steps is not None:
        changes["max_steps"] = steps
    return dataclasses.replace(sc, **changes) if changes else sc


@click.group()
def main():
    """Safe adaptive control lab for a planar two-link arm."""


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--method", "method_id", required=True,
              type=click.Choice([m.value for m in Method]))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--dt", type=float, default=None)
@click.option("--steps", type=int, default=None)
def run(scenario_path, method_id, out_path, seed, dt, steps):
    """Run one (scenario, method) trial and write its metrics CSV row."""
    sc = _apply_overrides(load_scenario(scenario_path), seed, dt, steps)
    rec = run_trial(sc, Method(method_id))
    with open(out_path, "w", newline="") as f:
        write_batch_csv([rec.metrics_row()], f)
    click.echo(f"{rec.scenario} {rec.method}: GOAL={rec.goals_reached} "
               f"VIOL={rec.violations} DIST={rec.min_distance:.4f} "
               f"AVG_DIST={rec.avg_distance:.4f}")


@main.command(name="batch")
@click.option("--dir", "scenario_dir", type=click.Path(exists=True), default=None,
              help="Directory of scenario JSON files (default: bundled trials).")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--dt", type=float, default=None)
@click.option("--steps", type=int, default=None)
def batch_cmd(scenario_dir, out_path, seed, dt, steps):
    """Run every scenario in a directory against every method."""
    if scenario_dir is None:
        paths = bundled_scenario_paths()
    else:
        paths = sorted(Path(scenario_dir).glob("*.json"))
    scenarios = [_apply_overrides(load_scenario(p), seed, dt, steps) for p in paths]
    rows = run_batch(scenarios, list(Method))
    with open(out_path, "w", newline="") as f:
        write_batch_csv(rows, f)
    click.echo(f"wrote {len(rows)} rows to {out_path} "
               f"(kernel backend: {kernels.BACKEND})")


@main.command(name="check-feasibility")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--theta-points", type=int, default=24, show_default=True)
@click.option("--directions", type=int, default=8, show_default=True)
def check_feasibility(scenario_path, theta_points, directions):
    """Sweep the workspace and report the (alpha, beta) certificates.

    For each joint configuration on a grid and each offset direction at the
    end effector, the family certificate is evaluated; the worst values
    bound what the robust controller will see at runtime.
    """
    sc = load_scenario(scenario_path)
    grid = build_family(sc.interval(), sc.grid_resolution)
    k1 = sc.safety.k1
    worst_alpha = math.inf
    worst_beta = math.inf
    infeasible = 0
    total = 0
    for t1 in np.linspace(-math.pi, math.pi, theta_points, endpoint=False):
        for t2 in np.linspace(-math.pi, math.pi, theta_points, endpoint=False):
            jac = point_jacobian(sc.phys, (t1, t2), 2, sc.phys.l2)
            for ang in np.linspace(0, 2 * math.pi, directions, endpoint=False):
                delta = np.array([math.cos(ang), math.sin(ang)])
                v = delta @ jac
                _, lg = kernels.family_lie(grid.samples, math.cos(t2),
                                           math.sin(t2), 0.0, 0.0,
                                           float(v[0]), float(v[1]), k1, 0.0)
                cert = feasibility(grid.with_derivatives(np.zeros(len(lg)), lg))
                total += 1
                worst_alpha = min(worst_alpha, cert.alpha)
                worst_beta = min(worst_beta, cert.beta)
                if not cert.feasible:
                    infeasible += 1
    click.echo(f"configurations checked: {total}")
    click.echo(f"worst alpha: {worst_alpha:.6f}")
    click.echo(f"worst beta:  {worst_beta:.6e}")
    click.echo(f"infeasible:  {infeasible} ({100.0 * infeasible / total:.2f}%)")
    sys.exit(0 if infeasible == 0 else 1)


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--record-dir", type=click.Path(), default="sessions",
              help="Where finished session records are persisted.")
@click.option("--static-dir", type=click.Path(exists=True), default=None,
              help="Built frontend directory to serve at the root path.")
def serve(scenario_path, port, host, record_dir, static_dir):
    """Run the live cursor session server (websocket JSON protocol)."""
    import uvicorn

    from .server import create_app

    app = create_app(load_scenario(scenario_path), record_dir=record_dir,
                     static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
