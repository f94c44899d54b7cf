"""Trial harness: metrics, scenario files, CSV determinism, replay."""
import dataclasses
import io

import numpy as np
import pytest

from rssa.harness import (CSV_COLUMNS, HumanTrack, Method, batch,
                          bundled_scenario_paths, load_scenario, run_trial,
                          violation_count, write_batch_csv)


@pytest.fixture(scope="module")
def scenario():
    sc = load_scenario(bundled_scenario_paths()[0])
    return dataclasses.replace(sc, max_steps=200)


def test_violation_count_counts_down_crossings():
    assert violation_count([0.3, 0.2, 0.1, 0.2, 0.3], 0.15) == 1
    assert violation_count([0.1, 0.2, 0.1, 0.2, 0.1], 0.15) == 3
    assert violation_count([0.1, 0.1, 0.1], 0.15) == 1  # initial breach: once
    assert violation_count([0.3, 0.3], 0.15) == 0
    with pytest.raises(ValueError):
        violation_count([], 0.15)


def test_bundled_scenarios_load_and_roundtrip():
    paths = bundled_scenario_paths()
    assert len(paths) == 3
    sc = load_scenario(paths[0])
    assert sc.name == "trial1"
    assert sc.phys.l1 == pytest.approx(0.25)
    assert sc.phys.l2 == pytest.approx(0.27)
    assert sc.safety.d_min == pytest.approx(0.15)
    assert sc.human.mode == "scripted"
    assert len(sc.robot_goals) >= 1


def test_method_properties():
    assert not Method.NO_OBSTACLE.filtered
    assert Method.M0.frozen_estimate and not Method.M1.frozen_estimate
    assert Method.M3.uses_family_grid and Method.M4.uses_family_grid
    assert not Method.M1.uses_family_grid
    assert Method.M2.robust_index and Method.M4.robust_index
    assert not Method.M3.robust_index


def test_human_track_modes():
    track = HumanTrack(mode="scripted", start=(0.5, 0.5),
                       goals=((0.1, 0.1),), natural_freq=2.0)
    pts = track.synthesize(0.01, 300)
    assert pts.shape == (301, 2)
    assert np.allclose(pts[0], [0.5, 0.5])
    # critically damped pursuit closes most of the gap in a few seconds
    assert np.linalg.norm(pts[-1] - [0.1, 0.1]) < 0.1
    rec = HumanTrack(mode="recorded", positions=np.zeros((10, 2)))
    with pytest.raises(ValueError):
        rec.synthesize(0.01, 100)
    with pytest.raises(ValueError):
        HumanTrack(mode="wandering").synthesize(0.01, 10)


def test_metrics_row_matches_csv_columns(scenario):
    rec = run_trial(scenario, Method.M1)
    assert list(rec.metrics_row().keys()) == CSV_COLUMNS
    assert rec.violations == violation_count(rec.d, scenario.safety.d_min)
    assert rec.min_distance == pytest.approx(rec.d.min())
    assert rec.avg_distance == pytest.approx(rec.d.mean())
    assert len(rec.t) == scenario.max_steps


def test_csv_format_nine_significant_digits():
    row = {"trial": "t", "method": "M1", "GOAL": 2, "VIOL": 0,
           "DIST": 0.123456789123, "AVG_DIST": 1.0 / 3.0,
           "clipped_ticks": 5, "infeasible_ticks": 0}
    buf = io.StringIO()
    write_batch_csv([row], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "t,M1,2,0,0.123456789,0.333333333,5,0"


def test_batch_is_byte_deterministic(scenario):
    methods = [Method.M1, Method.M3]
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        write_batch_csv(batch([scenario], methods), buf)
        outs.append(buf.getvalue())
    assert outs[0] == outs[1]
    assert outs[0].count("\n") == 1 + len(methods)


def test_recorded_track_replays_scripted_run(scenario):
    ref = run_trial(scenario, Method.M4)
    track = scenario.human.synthesize(scenario.dt, scenario.max_steps)
    rep = run_trial(scenario, Method.M4, cursor_track=track)
    assert np.array_equal(ref.d, rep.d)
    assert np.array_equal(ref.theta, rep.theta)
    assert ref.mode == rep.mode
    with pytest.raises(ValueError):
        run_trial(scenario, Method.M4, cursor_track=track[:10])


def test_cursor_source_abort_yields_partial_record(scenario):
    from rssa.harness import TrialAbort

    track = scenario.human.synthesize(scenario.dt, scenario.max_steps)

    def source(k):
        if k >= 50:
            raise TrialAbort
        return track[k]

    rec = run_trial(scenario, Method.M1, cursor_source=source)
    assert rec.aborted is not None
    assert len(rec.d) == 50


def test_scenario_validation():
    sc = load_scenario(bundled_scenario_paths()[0])
    with pytest.raises(ValueError):
        dataclasses.replace(sc, max_steps=0)
    with pytest.raises(ValueError):
        dataclasses.replace(sc, dt=0.0)
    with pytest.raises(ValueError):
        dataclasses.replace(sc, robot_goals=())
