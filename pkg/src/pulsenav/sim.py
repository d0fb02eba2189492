"""Closed-loop walker models, simulation runner, and trace metrics.

The ideal walker marches along the route geometry and is the oracle for
workflow-shape checks. The reactive walker only changes heading in
response to the emissions it hears, after a reaction latency, which is
what makes a run a genuine test of whether an encoding can steer
someone: counting-clock trains are decoded and executed as a rotation
by that angle, pings and compass clicks trigger rotation toward
shrinking deviation, milestone pulses gate halting and resuming.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import fsm
from .encoders import Meaning, MalformedTrainError, Pulse, PulseTrain, decode_direction_A
from .fsm import GuidanceMode, GuidanceOutput, NavParams, Phase, StateOut, TrainOut, VoiceOut
from .geometry import (
    DegenerateGeometryError,
    Point,
    Pose,
    Route,
    Side,
    WaypointKind,
    bearing,
    normalize_angle,
    project_progress,
    route_turn,
)
from .scheduler import Emission, PulseScheduler
from .trace import (
    PoseRecord,
    PulseRecord,
    SimTrace,
    StateRecord,
    TraceHeader,
    VoiceRecord,
)


class WalkerKind(Enum):
    IDEAL = "ideal"
    REACTIVE = "reactive"


@dataclass(frozen=True)
class WalkerModel:
    kind: WalkerKind = WalkerKind.REACTIVE
    speed_mps: float = 1.2
    reaction_latency_s: float = 0.6
    heading_noise_deg_std: float = 3.0
    turn_rate_dps: float = 120.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.speed_mps <= 0:
            raise ValueError("speed_mps must be positive")
        if self.reaction_latency_s < 0:
            raise ValueError("reaction_latency_s must be >= 0")
        if self.heading_noise_deg_std < 0:
            raise ValueError("heading_noise_deg_std must be >= 0")
        if self.turn_rate_dps <= 0:
            raise ValueError("turn_rate_dps must be positive")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "speed_mps": self.speed_mps,
            "reaction_latency_s": self.reaction_latency_s,
            "heading_noise_deg_std": self.heading_noise_deg_std,
            "turn_rate_dps": self.turn_rate_dps,
            "rng_seed": self.rng_seed,
        }


def mode_to_dict(mode: GuidanceMode) -> dict:
    return {
        "kind": mode.kind.value,
        "channel": mode.channel.value,
        "option": mode.direction_option.value if mode.direction_option else None,
        "voice": mode.voice_enabled,
        "announce_doors": mode.announce_doors,
    }


def mode_from_dict(d: dict) -> GuidanceMode:
    from .encoders import Channel, DirectionOption
    from .fsm import GuidanceKind

    return GuidanceMode(
        kind=GuidanceKind(d["kind"]),
        channel=Channel(d["channel"]),
        direction_option=DirectionOption(d["option"]) if d.get("option") else None,
        voice_enabled=bool(d.get("voice", False)),
        announce_doors=bool(d.get("announce_doors", True)),
    )


class _IdealWalker:
    """Marches along the polyline at constant speed, turning at vertices."""

    def __init__(self, route: Route, model: WalkerModel):
        self.route = route
        self.speed = model.speed_mps
        self.s = 0.0
        self.cum = route.cumulative_lengths

    def _segment_at(self, s: float) -> int:
        nseg = self.route.n_segments
        for i in range(nseg):
            if s < self.cum[i + 1] and self.cum[i + 1] > self.cum[i]:
                return i
        # at or past the end: last segment with real length
        for i in range(nseg - 1, -1, -1):
            if self.cum[i + 1] > self.cum[i]:
                return i
        raise ValueError("route has no traversable segment")

    def _pose_at(self, t: float) -> Pose:
        i = self._segment_at(self.s)
        a = self.route.waypoints[i].point
        b = self.route.waypoints[i + 1].point
        seg_len = self.cum[i + 1] - self.cum[i]
        frac = min(max((self.s - self.cum[i]) / seg_len, 0.0), 1.0)
        x = a.x + (b.x - a.x) * frac
        y = a.y + (b.y - a.y) * frac
        heading = self.route.segment_bearing(i)
        return Pose(Point(x, y, a.floor), heading if heading is not None else 0.0, t)

    def initial_pose(self) -> Pose:
        return self._pose_at(0.0)

    def advance(self, heard: list[Emission], t_next: float, dt: float) -> Pose:
        self.s = min(self.s + self.speed * dt, self.route.total_length)
        return self._pose_at(t_next)


class _ReactiveWalker:
    """Walks straight at its commanded heading; reacts only to emissions.

    Heading noise is per-tick jitter around the commanded heading, not a
    random walk: the command changes only through reactions.
    """

    def __init__(
        self, route: Route, model: WalkerModel, mode: GuidanceMode, params: NavParams
    ):
        import random

        self.route = route
        self.model = model
        self.mode = mode
        self.params = params
        self.rng = random.Random(model.rng_seed)
        start_pt = route.waypoints[0].point
        self.x, self.y, self.floor = start_pt.x, start_pt.y, start_pt.floor
        b0 = route.segment_bearing(0)
        self.intended = b0 if b0 is not None else 0.0
        self.halted = False
        self.rotating: Optional[tuple] = None  # ("by_angle", deg) | ("to_zero",)
        self.pending: list[tuple[float, int, str, float]] = []
        self._seq = 0
        self.dir_buffer: list[Emission] = []
        self.last_compass_pulse_t = -math.inf
        self.proj_hint = 0
        self._fc_vertices = [
            k
            for k in range(route.n_segments)
            if route.waypoints[k].kind is WaypointKind.FLOOR_CHANGE
            and route.waypoints[k].point.floor != route.waypoints[k + 1].point.floor
        ]
        self._fc_ptr = 0

    def initial_pose(self) -> Pose:
        return Pose(Point(self.x, self.y, self.floor), self.intended, 0.0)

    def _schedule(self, due_t: float, action: str, payload: float = 0.0) -> None:
        self._seq += 1
        self.pending.append((due_t, self._seq, action, payload))

    def _hear(self, e: Emission) -> None:
        lat = self.model.reaction_latency_s
        end = e.t_start + e.length_ms / 1000.0
        if e.source == "completion":
            self.dir_buffer.clear()
            self._schedule(e.t_start + lat, "halt")
        elif e.source == "success":
            self.dir_buffer.clear()
            self._schedule(end + lat, "resume")
        elif e.meaning is Meaning.DIRECTION:
            self.dir_buffer.append(e)
        elif e.meaning is Meaning.PING:
            if e.source == "compass":
                self.last_compass_pulse_t = e.t_start
                if self.rotating is None:
                    self._schedule(e.t_start + lat, "seek")
            else:
                self._schedule(end + lat, "halt_seek")

    def _finalize_direction_buffer(self, now: float) -> None:
        """A counting-clock train is readable once it has gone quiet."""
        if not self.dir_buffer:
            return
        last = self.dir_buffer[-1]
        last_end = last.t_start + last.length_ms / 1000.0
        if now - last_end <= 2.0 * self.params.direction.inter_pulse_gap_ms / 1000.0:
            return
        pulses = tuple(
            Pulse(e.length_ms, 0.0, e.channel) for e in self.dir_buffer
        )
        self.dir_buffer.clear()
        try:
            turn = decode_direction_A(PulseTrain(pulses, Meaning.DIRECTION), self.params.direction)
        except MalformedTrainError:
            return
        angle = turn.clock_hour * 30.0
        if turn.side is Side.LEFT:
            angle = -angle
        self._schedule(last_end + self.model.reaction_latency_s, "rotate_angle", angle)

    def _ground_deviation_sign(self) -> float:
        """Which way to rotate to face the next route vertex."""
        pose = Pose(Point(self.x, self.y, self.floor), self.intended, 0.0)
        try:
            seg, _along, _ = project_progress(pose, self.route, self.proj_hint)
        except ValueError:
            return 0.0
        self.proj_hint = max(self.proj_hint, seg)
        # skip vertices we are standing on; orient toward the corridor beyond
        target_idx = seg + 1
        last = len(self.route.waypoints) - 1
        while target_idx < last:
            tp = self.route.waypoints[target_idx].point
            if (
                tp.floor == self.floor
                and math.hypot(self.x - tp.x, self.y - tp.y)
                <= self.params.reach_radius_m
            ):
                target_idx += 1
            else:
                break
        target = self.route.waypoints[target_idx].point
        if target.floor != self.floor:
            return 0.0
        try:
            desired = bearing(Point(self.x, self.y, self.floor), target)
        except DegenerateGeometryError:
            return 0.0
        return normalize_angle(desired - self.intended)

    def advance(self, heard: list[Emission], t_next: float, dt: float) -> Pose:
        for e in heard:
            self._hear(e)
        self._finalize_direction_buffer(t_next)

        due = sorted(
            (p for p in self.pending if p[0] <= t_next), key=lambda p: (p[0], p[1])
        )
        self.pending = [p for p in self.pending if p[0] > t_next]
        event_mode = self.mode.kind is fsm.GuidanceKind.EVENT_BASED
        for _t, _seq, action, payload in due:
            if action == "halt":
                self.halted = True
            elif action == "resume":
                self.halted = False
                self.rotating = None
            elif action == "seek":
                self.rotating = ("to_zero",)
            elif action == "halt_seek":
                if event_mode:
                    self.halted = True
                self.rotating = ("to_zero",)
            elif action == "rotate_angle":
                if event_mode:
                    self.halted = True
                self.rotating = ("by_angle", payload)

        if (
            self.rotating is not None
            and self.rotating[0] == "to_zero"
            and self.mode.kind is fsm.GuidanceKind.COMPASS
        ):
            quiet_s = self.params.compass.interval_max_ms * 1.25 / 1000.0
            if t_next - self.last_compass_pulse_t > quiet_s:
                self.rotating = None

        step_max = self.model.turn_rate_dps * dt
        if self.rotating is not None:
            if self.rotating[0] == "to_zero":
                dev = self._ground_deviation_sign()
                if abs(dev) <= step_max:
                    self.intended = normalize_angle(self.intended + dev)
                    self.rotating = None
                else:
                    self.intended = normalize_angle(
                        self.intended + math.copysign(step_max, dev)
                    )
            else:
                _kind, remaining = self.rotating
                if abs(remaining) <= step_max:
                    self.intended = normalize_angle(self.intended + remaining)
                    self.rotating = None
                else:
                    turn = math.copysign(step_max, remaining)
                    self.intended = normalize_angle(self.intended + turn)
                    self.rotating = ("by_angle", remaining - turn)

        jitter = self.rng.gauss(0.0, self.model.heading_noise_deg_std)
        actual = normalize_angle(self.intended + jitter)
        if not self.halted:
            dist = self.model.speed_mps * dt
            rad = math.radians(actual)
            self.x += dist * math.sin(rad)
            self.y += dist * math.cos(rad)

        self._maybe_change_floor()
        return Pose(Point(self.x, self.y, self.floor), actual, t_next)

    def _maybe_change_floor(self) -> None:
        # stepping into a stairs/elevator vertex transports to its far end
        while self._fc_ptr < len(self._fc_vertices):
            k = self._fc_vertices[self._fc_ptr]
            fc = self.route.waypoints[k].point
            if fc.floor != self.floor:
                return
            if math.hypot(self.x - fc.x, self.y - fc.y) > self.params.reach_radius_m:
                return
            exit_pt = self.route.waypoints[k + 1].point
            self.x, self.y, self.floor = exit_pt.x, exit_pt.y, exit_pt.floor
            b = (
                self.route.segment_bearing(k + 1)
                if k + 1 < self.route.n_segments
                else None
            )
            if b is not None:
                self.intended = b
            self.proj_hint = max(self.proj_hint, min(k + 1, self.route.n_segments - 1))
            self._fc_ptr += 1


def _make_walker(route: Route, model: WalkerModel, mode: GuidanceMode, params: NavParams):
    if model.kind is WalkerKind.IDEAL:
        return _IdealWalker(route, model)
    return _ReactiveWalker(route, model, mode, params)


def _record_outputs(
    out: GuidanceOutput,
    events: list,
    sched: PulseScheduler,
) -> None:
    for ev in out.events:
        if isinstance(ev, VoiceOut):
            events.append(VoiceRecord(ev.t, ev.text))
        elif isinstance(ev, StateOut):
            drops = sched.stale_drops if ev.phase is Phase.ARRIVED else None
            events.append(StateRecord(ev.t, ev.phase.value, ev.waypoint, drops))
        elif isinstance(ev, TrainOut):
            sched.enqueue(ev.train, ev.t, ev.source, ev.stale_after_ms)


def _pulse_record(e: Emission) -> PulseRecord:
    return PulseRecord(e.t_start, e.channel.value, e.length_ms, e.meaning.value, e.source)


def run(
    route: Route,
    walker: WalkerModel,
    mode: GuidanceMode,
    params: Optional[NavParams] = None,
    tick_s: float = 0.1,
    timeout_s: float = 600.0,
    map_name: str = "",
) -> SimTrace:
    """Simulate one guided walk; the trace records everything that happened."""
    if tick_s <= 0:
        raise ValueError("tick_s must be positive")
    params = params or NavParams()
    header = TraceHeader(
        map_name=map_name,
        route_id=route.id,
        mode=mode_to_dict(mode),
        walker=walker.to_dict(),
        seed=walker.rng_seed,
        tick_s=tick_s,
    )
    model = _make_walker(route, walker, mode, params)
    state, out0 = fsm.start(route, mode, params, t0=0.0)
    sched = PulseScheduler()
    events: list = []
    _record_outputs(out0, events, sched)

    pose = model.initial_pose()
    n_ticks = int(round(timeout_s / tick_s))
    arrived = False
    for i in range(n_ticks + 1):
        t = i * tick_s
        due = sched.drain_due(t)
        events.extend(_pulse_record(e) for e in due)
        events.append(PoseRecord(t, pose.position.x, pose.position.y, pose.position.floor, pose.heading))
        state, out = fsm.step(state, pose, route, mode, params)
        _record_outputs(out, events, sched)
        if state.phase is Phase.ARRIVED:
            arrived = True
            break
        pose = model.advance(due, (i + 1) * tick_s, tick_s)
    if not arrived:
        events.append(
            StateRecord(n_ticks * tick_s, "timeout", None, sched.stale_drops)
        )
    return SimTrace(header, events)


def replay(
    trace: SimTrace, route: Route, params: Optional[NavParams] = None
) -> SimTrace:
    """Re-run a stored pose stream through a fresh engine.

    With matching params this reproduces the stored emissions exactly;
    it is how persisted sessions are reconstructed.
    """
    params = params or NavParams()
    mode = mode_from_dict(trace.header.mode)
    state, out0 = fsm.start(route, mode, params, t0=0.0)
    sched = PulseScheduler()
    events: list = []
    _record_outputs(out0, events, sched)
    arrived = False
    last_t = 0.0
    for rec in trace.poses():
        last_t = rec.t
        due = sched.drain_due(rec.t)
        events.extend(_pulse_record(e) for e in due)
        events.append(rec)
        pose = Pose(Point(rec.x, rec.y, rec.floor), rec.heading, rec.t)
        state, out = fsm.step(state, pose, route, mode, params)
        _record_outputs(out, events, sched)
        if state.phase is Phase.ARRIVED:
            arrived = True
            break
    if not arrived:
        events.append(StateRecord(last_t, "timeout", None, sched.stale_drops))
    return SimTrace(trace.header, events)


@dataclass
class MetricsReport:
    completed: bool
    completion_time_s: Optional[float]
    route_length_m: float
    overshoot_m: dict[int, float]
    reorientation_count: int
    pulses_emitted: dict[str, int]
    deviation_rms_deg: float

    def to_dict(self) -> dict:
        d = {
            "completed": self.completed,
            "route_length_m": self.route_length_m,
            "overshoot_m": {str(k): v for k, v in sorted(self.overshoot_m.items())},
            "reorientation_count": self.reorientation_count,
            "pulses_emitted": dict(sorted(self.pulses_emitted.items())),
            "deviation_rms_deg": self.deviation_rms_deg,
        }
        if self.completion_time_s is not None:
            d["completion_time_s"] = self.completion_time_s
        return d


#: heading change (degrees) from the incoming bearing that counts as the
#: turn being initiated; above 3 sigma of the default walker jitter
_TURN_START_DEG = 12.0


def metrics(trace: SimTrace, route: Route) -> MetricsReport:
    """Quality measures of one run: overshoots, reorientations, pulse counts."""
    if trace.header.route_id != route.id:
        raise ValueError(
            f"trace is for route {trace.header.route_id!r}, not {route.id!r}"
        )
    poses = list(trace.poses())
    if not poses:
        raise ValueError("trace contains no poses")
    cum = route.cumulative_lengths

    progress: list[tuple[PoseRecord, float, int]] = []
    hint = 0
    for rec in poses:
        pose = Pose(Point(rec.x, rec.y, rec.floor), rec.heading, rec.t)
        try:
            seg, along, _ = project_progress(pose, route, hint)
        except ValueError:
            continue
        hint = max(hint, seg)
        progress.append((rec, cum[seg] + along, seg))

    # overshoot: progress past the vertex continuing along the incoming
    # course, before the heading first swings toward the outgoing side
    overshoot: dict[int, float] = {}
    for j in route.junction_indices:
        turn = route_turn(route, j)
        if turn.clock_hour == 0:
            continue
        incoming = route.segment_bearing(j - 1)
        if incoming is None:
            continue
        sign = 1.0 if turn.side is Side.RIGHT else -1.0
        vertex = route.waypoints[j].point
        inc_rad = math.radians(incoming)
        ux, uy = math.sin(inc_rad), math.cos(inc_rad)
        s_j = cum[j]
        max_beyond = 0.0
        for rec, s, _seg in progress:
            if s < s_j - 5.0 or rec.floor != vertex.floor:
                continue
            beyond = (rec.x - vertex.x) * ux + (rec.y - vertex.y) * uy
            if beyond > 15.0:
                break
            if s >= s_j - 1e-9 or beyond > 0.0:
                delta = normalize_angle(rec.heading - incoming)
                if sign * delta >= _TURN_START_DEG:
                    break
                max_beyond = max(max_beyond, beyond)
        overshoot[j] = max(0.0, max_beyond)

    reorientations = sum(
        1
        for e in trace.states()
        if e.phase in (Phase.ADJUSTING.value, Phase.OFF_COURSE.value)
    )
    pulse_counts = Counter(p.source for p in trace.pulses())

    sq_sum = 0.0
    n_dev = 0
    for rec, _s, seg in progress:
        target = route.waypoints[seg + 1].point
        if target.floor != rec.floor:
            continue
        if math.hypot(target.x - rec.x, target.y - rec.y) < 0.01:
            continue
        dev = normalize_angle(
            bearing(Point(rec.x, rec.y, rec.floor), target) - rec.heading
        )
        sq_sum += dev * dev
        n_dev += 1
    rms = math.sqrt(sq_sum / n_dev) if n_dev else 0.0

    return MetricsReport(
        completed=trace.completed,
        completion_time_s=trace.completion_time_s,
        route_length_m=route.total_length,
        overshoot_m=overshoot,
        reorientation_count=reorientations,
        pulses_emitted=dict(pulse_counts),
        deviation_rms_deg=rms,
    )
