"""WebSocket guidance session service.

One guidance session per connection; the server is authoritative: it
runs the state machine and the pulse scheduler against client-supplied
poses, and delivers pulse emissions on the wall clock. Session time is
the client's pose clock; between poses it advances with the server's
monotonic clock so pulses land on schedule even if the client goes
quiet.

Messages are JSON text. Client to server: start, pose, stop. Server to
client: route, pulse, voice, state, error.
"""

from __future__ import annotations

import asyncio
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import fsm
from .fsm import GuidanceMode, GuidanceState, NavParams, Phase, StateOut, TrainOut, VoiceOut
from .geometry import Point, Pose, Route
from .mapio import MapDocument, map_to_dict
from .scheduler import Emission, PulseScheduler

DRAIN_PERIOD_S = 0.02


@dataclass
class _Session:
    route: Route
    mode: GuidanceMode
    params: NavParams
    state: GuidanceState
    sched: PulseScheduler
    last_pose_t: float = 0.0
    wall_at_pose: float = field(default_factory=time.monotonic)
    session_now: float = 0.0

    def clock_now(self) -> float:
        wall = self.last_pose_t + (time.monotonic() - self.wall_at_pose)
        self.session_now = max(self.session_now, wall)
        return self.session_now

    def sync(self, pose_t: float) -> None:
        self.last_pose_t = pose_t
        self.wall_at_pose = time.monotonic()
        self.session_now = max(self.session_now, pose_t)


def _emission_msg(e: Emission) -> dict:
    return {
        "type": "pulse",
        "t": e.t_start,
        "channel": e.channel.value,
        "length_ms": e.length_ms,
        "meaning": e.meaning.value,
        "source": e.source,
    }


def _route_msg(route: Route) -> dict:
    from .mapio import _kind_to_str

    return {
        "type": "route",
        "waypoints": [
            {
                "x": w.point.x,
                "y": w.point.y,
                "floor": w.point.floor,
                "kind": _kind_to_str(w),
                "label": w.label,
            }
            for w in route.waypoints
        ],
    }


def create_app(doc: MapDocument, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="pulsenav session service")

    @app.get("/map")
    def get_map() -> dict:
        return map_to_dict(doc)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session: Optional[_Session] = None
        lock = asyncio.Lock()

        async def send_error(message: str) -> None:
            await ws.send_json({"type": "error", "message": message})

        async def flush_due(now: float) -> None:
            # caller must hold the lock
            for e in session.sched.drain_due(now):
                await ws.send_json(_emission_msg(e))

        async def drain_loop() -> None:
            while True:
                await asyncio.sleep(DRAIN_PERIOD_S)
                async with lock:
                    if session is not None and session.state.phase is not Phase.ARRIVED:
                        await flush_due(session.clock_now())

        async def deliver(outputs) -> None:
            for ev in outputs.events:
                if isinstance(ev, VoiceOut):
                    await ws.send_json({"type": "voice", "t": ev.t, "text": ev.text})
                elif isinstance(ev, StateOut):
                    await ws.send_json(
                        {
                            "type": "state",
                            "t": ev.t,
                            "phase": ev.phase.value,
                            "waypoint": ev.waypoint,
                        }
                    )
                elif isinstance(ev, TrainOut):
                    session.sched.enqueue(ev.train, ev.t, ev.source, ev.stale_after_ms)

        drainer = asyncio.create_task(drain_loop())
        try:
            while True:
                try:
                    msg = await ws.receive_json()
                except (ValueError, KeyError):
                    await send_error("malformed message: expected JSON text")
                    continue
                mtype = msg.get("type")

                if mtype == "start":
                    async with lock:
                        route = doc.find_route(msg.get("from", ""), msg.get("to", ""))
                        if route is None:
                            await send_error(
                                f"no route from {msg.get('from')!r} to {msg.get('to')!r}"
                            )
                            continue
                        try:
                            mode = GuidanceMode.from_string(
                                msg.get("mode", "event-a"),
                                voice=bool(msg.get("voice", False)),
                            )
                        except ValueError as e:
                            await send_error(str(e))
                            continue
                        params = NavParams()
                        state, out0 = fsm.start(route, mode, params, t0=0.0)
                        session = _Session(route, mode, params, state, PulseScheduler())
                        await ws.send_json(_route_msg(route))
                        await deliver(out0)

                elif mtype == "pose":
                    async with lock:
                        if session is None:
                            await send_error("no active session; send start first")
                            continue
                        if session.state.phase is Phase.ARRIVED:
                            await send_error("session already arrived")
                            continue
                        try:
                            pose = Pose(
                                Point(
                                    float(msg["x"]),
                                    float(msg["y"]),
                                    str(msg.get("floor", "0")),
                                ),
                                float(msg["heading"]),
                                float(msg["t"]),
                            )
                        except (KeyError, TypeError, ValueError):
                            await send_error("malformed pose message")
                            continue
                        try:
                            _, out = fsm.step(
                                session.state, pose, session.route, session.mode, session.params
                            )
                        except ValueError as e:
                            await send_error(str(e))
                            continue
                        session.sync(pose.t)
                        await deliver(out)
                        await flush_due(session.clock_now())

                elif mtype == "stop":
                    async with lock:
                        session = None
                        await ws.send_json(
                            {"type": "state", "t": None, "phase": "idle", "waypoint": None}
                        )

                else:
                    await send_error(f"unknown message type: {mtype!r}")
        except WebSocketDisconnect:
            pass
        finally:
            drainer.cancel()

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
