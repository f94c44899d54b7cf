"""Live session server: a websocket endpoint that runs the simulation at
wall-clock rate against a human-steered cursor.

Protocol (JSON, one object per message):

  client -> server
    {"type": "cursor", "x": <m>, "y": <m>}
    {"type": "start", "method": "M1".."M4"}
    {"type": "reset", "method": ...}        # same as start; ends any trial

  server -> client
    {"type": "frame", "k", "theta", "cursor", "d", "phi", "mode", "goals"}
    {"type": "summary", ...metrics}          # at trial end
    {"type": "warning", "detail": ...}       # malformed input, dropped

One session per connection.  A cursor message received at tick k takes
effect at tick k+1 at the latest (the trial thread reads the latest held
cursor once per tick).  Outbound frames never block the simulation: the
frame queue keeps only the most recent frames and drops the oldest.  On
disconnect the trial ends and its record is persisted to `record_dir`.
"""
from __future__ import annotations

import asyncio
import json
import math
import threading
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .harness import Method, Scenario, TrialAbort, TrialRecord, run_trial

__all__ = ["create_app", "CursorHolder"]

LIVE_METHODS = (Method.M1, Method.M2, Method.M3, Method.M4)


class CursorHolder:
    """Thread-safe latest-wins cursor cell.

    The trial thread reads it once per tick, so a value stored before the
    tick-k read is in effect at tick k: cursor-to-effect latency is at most
    one tick.
    """

    def __init__(self, initial):
        self._lock = threading.Lock()
        self._pos = (float(initial[0]), float(initial[1]))

    def set(self, x: float, y: float) -> None:
        with self._lock:
            self._pos = (float(x), float(y))

    def get(self) -> tuple[float, float]:
        with self._lock:
            return self._pos


class _Session:
    """One running trial bound to one websocket connection."""

    def __init__(self, scenario: Scenario, method: Method, loop, frames: asyncio.Queue,
                 realtime: bool):
        self.scenario = scenario
        self.method = method
        self.loop = loop
        self.frames = frames
        self.realtime = realtime
        self.cursor = CursorHolder(scenario.human.start)
        self.stop_flag = threading.Event()
        self.record: TrialRecord | None = None
        self.thread = threading.Thread(target=self._run, daemon=True)

    def start(self):
        self.thread.start()

    def stop(self):
        self.stop_flag.set()

    def _emit(self, payload: dict):
        def put():
            # latest-wins: drop the oldest frame when the client lags
            while self.frames.full():
                try:
                    self.frames.get_nowait()
                except asyncio.QueueEmpty:
                    break
            self.frames.put_nowait(payload)
        self.loop.call_soon_threadsafe(put)

    def _run(self):
        dt = self.scenario.dt
        t0 = time.monotonic()

        def cursor_source(k: int):
            if self.stop_flag.is_set():
                raise TrialAbort
            if self.realtime and k > 0:
                deadline = t0 + k * dt
                delay = deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
            return self.cursor.get()

        def on_tick(k, state, frame):
            self._emit({
                "type": "frame", "k": k,
                "theta": [state.theta[0], state.theta[1]],
                "cursor": list(frame["cursor"]),
                "d": frame["d"], "phi": frame["phi"],
                "mode": frame["mode"], "goals": frame["goals"],
            })

        try:
            self.record = run_trial(self.scenario, self.method,
                                    cursor_source=cursor_source, on_tick=on_tick)
            summary = {"type": "summary", **self.record.metrics_row()}
            if not math.isfinite(summary["DIST"]):
                summary["DIST"] = None
                summary["AVG_DIST"] = None
            self._emit(summary)
        except Exception as exc:  # surfaced to the client, not fatal
            self._emit({"type": "warning", "detail": f"trial failed: {exc}"})


def _persist(record: TrialRecord, record_dir: Path) -> Path:
    record_dir.mkdir(parents=True, exist_ok=True)
    path = record_dir / f"session-{int(time.time() * 1000)}-{record.method}.json"
    payload = {
        "scenario": record.scenario,
        "method": record.method,
        "metrics": {k: (v if not isinstance(v, float) or math.isfinite(v) else None)
                    for k, v in record.metrics_row().items()},
        "cursor_track_m": record.cursor.tolist(),
        "d_series_m": record.d.tolist(),
        "aborted": record.aborted,
    }
    path.write_text(json.dumps(payload))
    return path


def create_app(scenario: Scenario, record_dir: str | Path = "sessions",
               realtime: bool = True,
               static_dir: str | Path | None = None) -> FastAPI:
    """Build the session app.  `realtime=False` free-runs the simulation
    (used by tests and replays).  `static_dir` optionally serves a built
    cockpit frontend at the root path."""
    app = FastAPI()
    record_dir = Path(record_dir)

    @app.get("/scenario")
    def scenario_info():
        return {
            "name": scenario.name,
            "dt_s": scenario.dt,
            "max_steps": scenario.max_steps,
            "l1_m": scenario.phys.l1,
            "l2_m": scenario.phys.l2,
            "d_min_m": scenario.safety.d_min,
            "robot_goals_m": [list(g) for g in scenario.robot_goals],
            "cursor_start_m": list(scenario.human.start),
            "methods": [m.value for m in LIVE_METHODS],
        }

    @app.websocket("/ws")
    async def ws(socket: WebSocket):
        await socket.accept()
        loop = asyncio.get_running_loop()
        frames: asyncio.Queue = asyncio.Queue(maxsize=16)
        session: _Session | None = None

        async def pump_frames():
            while True:
                payload = await frames.get()
                await socket.send_text(json.dumps(payload))

        pump = asyncio.create_task(pump_frames())
        try:
            while True:
                raw = await socket.receive_text()
                try:
                    msg = json.loads(raw)
                    kind = msg["type"]
                except (ValueError, KeyError, TypeError):
                    await socket.send_text(json.dumps(
                        {"type": "warning", "detail": "malformed message ignored"}))
                    continue
                if kind == "cursor":
                    try:
                        x, y = float(msg["x"]), float(msg["y"])
                    except (KeyError, TypeError, ValueError):
                        await socket.send_text(json.dumps(
                            {"type": "warning", "detail": "bad cursor message"}))
                        continue
                    if session is not None and math.isfinite(x) and math.isfinite(y):
                        session.cursor.set(x, y)
                elif kind in ("start", "reset"):
                    try:
                        method = Method(msg.get("method", "M4"))
                    except ValueError:
                        await socket.send_text(json.dumps(
                            {"type": "warning", "detail": "unknown method"}))
                        continue
                    if session is not None:
                        session.stop()
                        session.thread.join(timeout=5.0)
                        if session.record is not None:
                            _persist(session.record, record_dir)
                    session = _Session(scenario, method, loop, frames, realtime)
                    session.start()
                else:
                    await socket.send_text(json.dumps(
                        {"type": "warning", "detail": f"unknown type {kind!r}"}))
        except WebSocketDisconnect:
            pass
        finally:
            pump.cancel()
            if session is not None:
                session.stop()
                session.thread.join(timeout=5.0)
                if session.record is not None:
                    _persist(session.record, record_dir)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
