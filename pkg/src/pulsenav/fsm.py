"""Guidance state machines: event-based junction workflow and compass mode.

One session is a GuidanceState value advanced by step(); every decision
is a function of (route, mode, params, pose stream), so identical pose
streams yield identical outputs. step() emits pulse-train requests and
voice lines; expanding trains into timed emissions is the scheduler's
job.

Event-based flow per junction: distance cadence while approaching, a
completion pulse plus spoken turn on reach, repeated direction signals
while the user rotates, then a success pulse once aligned. Doors and
floor changes are voice-only: they never produce cadence or milestone
pulses, so straight stretches stay silent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .encoders import (
    Channel,
    CompassConfig,
    DirectionConfig,
    DirectionOption,
    DistanceConfig,
    GuidanceEvent,
    Meaning,
    Pulse,
    PulseTrain,
    compass_interval,
    completion_signal,
    distance_interval,
    encode_direction_A,
    encode_direction_B,
    success_signal,
    voice_instruction,
)
from .geometry import (
    DegenerateGeometryError,
    Pose,
    Route,
    WaypointKind,
    classify_deviation,
    project_progress,
    route_turn,
    signed_deviation,
)


class GuidanceKind(Enum):
    COMPASS = "compass"
    EVENT_BASED = "event_based"


@dataclass(frozen=True)
class GuidanceMode:
    kind: GuidanceKind
    channel: Channel = Channel.HAPTIC
    direction_option: Optional[DirectionOption] = None
    voice_enabled: bool = False
    announce_doors: bool = True

    def __post_init__(self):
        if (self.direction_option is not None) != (
            self.kind is GuidanceKind.EVENT_BASED
        ):
            raise ValueError(
                "direction_option must be set exactly for event_based mode"
            )

    @classmethod
    def from_string(cls, name: str, voice: bool = False) -> "GuidanceMode":
        table = {
            "compass-haptic": (GuidanceKind.COMPASS, Channel.HAPTIC, None),
            "compass-audio": (GuidanceKind.COMPASS, Channel.AUDIO, None),
            "event-a": (
                GuidanceKind.EVENT_BASED,
                Channel.HAPTIC,
                DirectionOption.A_COUNTING_CLOCK,
            ),
            "event-b": (
                GuidanceKind.EVENT_BASED,
                Channel.HAPTIC,
                DirectionOption.B_PING,
            ),
        }
        if name not in table:
            raise ValueError(f"unknown guidance mode: {name!r}")
        kind, channel, option = table[name]
        return cls(kind, channel, option, voice_enabled=voice)

    def to_string(self) -> str:
        if self.kind is GuidanceKind.COMPASS:
            return f"compass-{self.channel.value}"
        return "event-a" if self.direction_option is DirectionOption.A_COUNTING_CLOCK else "event-b"


@dataclass(frozen=True)
class NavParams:
    """Thresholds of the junction workflow and the encoder configs."""

    reach_radius_m: float = 1.0
    align_tol_deg: float = 15.0
    off_course_deg: float = 30.0
    off_course_sustain_s: float = 2.0
    repeat_gap_s: float = 2.5
    door_announce_m: float = 5.0
    speed_window_s: float = 2.0
    #: approach trigger grows to speed * lookahead so fast walkers still
    #: get the full cadence ramp instead of late pulses
    lookahead_s: float = 4.0
    compass: CompassConfig = field(default_factory=CompassConfig)
    distance: DistanceConfig = field(default_factory=DistanceConfig)
    direction: DirectionConfig = field(default_factory=DirectionConfig)


class Phase(Enum):
    IDLE = "idle"
    FOLLOWING = "following"
    APPROACHING = "approaching"
    ADJUSTING = "adjusting"
    OFF_COURSE = "off_course"
    ARRIVED = "arrived"


@dataclass(frozen=True)
class VoiceOut:
    t: float
    text: str
    event: GuidanceEvent


@dataclass(frozen=True)
class TrainOut:
    t: float
    train: PulseTrain
    source: str
    stale_after_ms: Optional[float] = None


@dataclass(frozen=True)
class StateOut:
    t: float
    phase: Phase
    waypoint: Optional[int]


OutputEvent = Union[VoiceOut, TrainOut, StateOut]


@dataclass
class GuidanceOutput:
    events: list[OutputEvent] = field(default_factory=list)


@dataclass
class GuidanceState:
    """Mutable per-session value; advance it only through step()."""

    phase: Phase
    segment_hint: int = 0
    phase_waypoint: Optional[int] = None
    next_event_idx: int = 1
    steer_target_idx: int = 1
    next_side_ptr: int = 0
    last_pose_t: Optional[float] = None
    start_t: Optional[float] = None
    pose_window: list[tuple[float, float, float, str]] = field(default_factory=list)
    speed_estimate: float = 0.0
    last_compass_t: float = -math.inf
    last_distance_t: float = -math.inf
    direction_block_until: float = -math.inf
    off_course_since: Optional[float] = None


def _next_event_index(route: Route, after: int) -> int:
    """First junction at a later vertex, else the destination."""
    for k in range(after + 1, len(route.waypoints)):
        if route.waypoints[k].kind is WaypointKind.JUNCTION:
            return k
    return route.destination_index


def start(
    route: Route, mode: GuidanceMode, params: NavParams = NavParams(), t0: float = 0.0
) -> tuple[GuidanceState, GuidanceOutput]:
    """Create a session in following(0), announcing departure if voiced."""
    if len(route.waypoints) < 2:
        raise ValueError("route must have at least 2 waypoints")
    state = GuidanceState(
        phase=Phase.FOLLOWING,
        next_event_idx=_next_event_index(route, 0),
        steer_target_idx=1,
    )
    out = GuidanceOutput()
    if mode.voice_enabled:
        out.events.append(
            VoiceOut(t0, voice_instruction(GuidanceEvent.DEPART), GuidanceEvent.DEPART)
        )
    out.events.append(StateOut(t0, Phase.FOLLOWING, 0))
    return state, out


def estimate_speed(state: GuidanceState, pose: Pose, window_s: float = 2.0) -> float:
    """Mean ground speed over the trailing window of poses, m/s."""
    pts = [
        p for p in state.pose_window if pose.t - p[0] <= window_s
    ] + [(pose.t, pose.position.x, pose.position.y, pose.position.floor)]
    if len(pts) < 2:
        return 0.0
    span = pts[-1][0] - pts[0][0]
    if span <= 0:
        return 0.0
    path = 0.0
    for a, b in zip(pts, pts[1:]):
        if a[3] == b[3]:
            path += math.hypot(b[1] - a[1], b[2] - a[2])
    return path / span


def _deviation_to_vertex(pose: Pose, route: Route, vertex: int) -> Optional[float]:
    """Signed deviation to a route vertex; None if degenerate or cross-floor."""
    target = route.waypoints[vertex].point
    if target.floor != pose.position.floor:
        return None
    try:
        return signed_deviation(pose, target)
    except DegenerateGeometryError:
        return None


def _emit_voice(out: GuidanceOutput, t: float, event: GuidanceEvent, **kw) -> None:
    out.events.append(VoiceOut(t, voice_instruction(event, **kw), event))


def step(
    state: GuidanceState,
    pose: Pose,
    route: Route,
    mode: GuidanceMode,
    params: NavParams = NavParams(),
) -> tuple[GuidanceState, GuidanceOutput]:
    """Advance one session by one pose; returns the state and its emissions."""
    if state.phase is Phase.ARRIVED:
        raise ValueError("session already arrived")
    if state.last_pose_t is not None and pose.t < state.last_pose_t:
        raise ValueError(f"pose time regression: {pose.t} < {state.last_pose_t}")
    if pose.position.floor not in route.floors:
        raise ValueError(f"pose on unknown floor: {pose.position.floor!r}")

    out = GuidanceOutput()
    now = pose.t
    if state.start_t is None:
        state.start_t = now
    state.last_pose_t = now

    state.speed_estimate = estimate_speed(state, pose, params.speed_window_s)
    state.pose_window.append(
        (now, pose.position.x, pose.position.y, pose.position.floor)
    )
    state.pose_window = [
        p for p in state.pose_window if now - p[0] <= params.speed_window_s
    ]

    seg, along, _cross = project_progress(pose, route, state.segment_hint)
    state.segment_hint = max(state.segment_hint, seg)

    _announce_side_waypoints(state, pose, route, mode, params, out, seg, along)

    if mode.kind is GuidanceKind.COMPASS:
        _step_compass(state, pose, route, mode, params, out, seg, along)
    else:
        _step_event(state, pose, route, mode, params, out)
    return state, out


def _announce_side_waypoints(state, pose, route, mode, params, out, seg, along):
    """Voice-only notices for doors and floor changes, once each."""
    if not (mode.voice_enabled and mode.announce_doors):
        return
    cum = route.cumulative_lengths
    here = cum[seg] + along
    sides = route.side_indices
    while state.next_side_ptr < len(sides):
        k = sides[state.next_side_ptr]
        if k <= seg:
            state.next_side_ptr += 1  # passed without announcing; stay silent
            continue
        if cum[k] - here > params.door_announce_m:
            break
        kind = route.waypoints[k].kind
        event = (
            GuidanceEvent.DOOR
            if kind is WaypointKind.DOOR
            else GuidanceEvent.FLOOR_CHANGE
        )
        _emit_voice(out, pose.t, event)
        state.next_side_ptr += 1


def _reached(pose, route, vertex, remaining, reach_radius):
    """A vertex counts as reached when close by or already passed abeam."""
    if remaining <= reach_radius:
        return True
    target = route.waypoints[vertex].point
    if target.floor != pose.position.floor:
        return False
    return pose.position.distance_to(target) <= reach_radius


def _steer_vertex(pose, route, first: int, reach_radius: float) -> int:
    """First vertex at arm's length or more; bearings to nearer ones swing
    too wildly to steer by."""
    idx = first
    last = len(route.waypoints) - 1
    while idx < last:
        tp = route.waypoints[idx].point
        if (
            tp.floor == pose.position.floor
            and pose.position.distance_to(tp) <= reach_radius
        ):
            idx += 1
        else:
            break
    return idx


def _direction_train(mode: GuidanceMode, params: NavParams, deviation: float) -> PulseTrain:
    if mode.direction_option is DirectionOption.A_COUNTING_CLOCK:
        return encode_direction_A(
            classify_deviation(deviation), params.direction, mode.channel
        )
    return encode_direction_B(params.direction, mode.channel)


def _emit_direction(state, out, mode, params, now, deviation):
    """Repeated turn signal, spaced so trains never run into each other."""
    if now < state.direction_block_until:
        return
    train = _direction_train(mode, params, deviation)
    out.events.append(TrainOut(now, train, "direction"))
    state.direction_block_until = (
        now + train.duration_ms / 1000.0 + params.repeat_gap_s
    )


def _arrive(state, out, mode, now, dest):
    if mode.voice_enabled:
        _emit_voice(out, now, GuidanceEvent.ARRIVED)
    out.events.append(StateOut(now, Phase.ARRIVED, dest))
    state.phase = Phase.ARRIVED


def _step_event(state, pose, route, mode, params, out):
    now = pose.t
    dest = route.destination_index
    cum = route.cumulative_lengths

    # transitions may chain (e.g. adjust -> follow -> approach on short
    # segments); bound the walk by the route size
    for _ in range(len(route.waypoints) + 4):
        seg, along, _cross = project_progress(pose, route, state.segment_hint)
        state.segment_hint = max(state.segment_hint, seg)
        here = cum[seg] + along
        target = state.next_event_idx
        remaining = max(cum[target] - here, 0.0)

        if state.phase in (Phase.FOLLOWING, Phase.APPROACHING, Phase.OFF_COURSE):
            if _reached(pose, route, target, remaining, params.reach_radius_m):
                if target == dest:
                    _arrive(state, out, mode, now, dest)
                    return
                turn = route_turn(route, target)
                out.events.append(
                    TrainOut(
                        now, completion_signal(params.direction, mode.channel),
                        "completion",
                    )
                )
                if mode.voice_enabled:
                    _emit_voice(out, now, GuidanceEvent.AT_TURN, turn=turn)
                out.events.append(StateOut(now, Phase.ADJUSTING, target))
                state.phase = Phase.ADJUSTING
                state.phase_waypoint = target
                state.direction_block_until = -math.inf
                state.off_course_since = None
                continue

        if state.phase is Phase.FOLLOWING:
            trigger = max(
                params.distance.trigger_distance_m,
                state.speed_estimate * params.lookahead_s,
            )
            if remaining <= trigger:
                out.events.append(StateOut(now, Phase.APPROACHING, target))
                state.phase = Phase.APPROACHING
                state.phase_waypoint = target
                state.last_distance_t = -math.inf
                state.off_course_since = None
                if mode.voice_enabled and target != dest:
                    _emit_voice(
                        out,
                        now,
                        GuidanceEvent.APPROACH_TURN,
                        turn=route_turn(route, target),
                        distance_m=remaining,
                    )
                continue
            steer = _steer_vertex(pose, route, seg + 1, params.reach_radius_m)
            dev = _deviation_to_vertex(pose, route, steer)
            if dev is not None and abs(dev) > params.off_course_deg:
                if state.off_course_since is None:
                    state.off_course_since = now
                elif now - state.off_course_since >= params.off_course_sustain_s:
                    out.events.append(StateOut(now, Phase.OFF_COURSE, None))
                    state.phase = Phase.OFF_COURSE
                    state.direction_block_until = -math.inf
                    if mode.voice_enabled:
                        _emit_voice(
                            out,
                            now,
                            GuidanceEvent.OFF_COURSE,
                            turn=classify_deviation(dev),
                        )
                    continue
            else:
                state.off_course_since = None
            return

        if state.phase is Phase.APPROACHING:
            interval = distance_interval(remaining, params.distance)
            if interval is not None and now - state.last_distance_t >= interval / 1000.0:
                pulse_train = PulseTrain(
                    (
                        _single_pulse(
                            params.distance.pulse_length_ms, mode.channel
                        ),
                    ),
                    Meaning.DISTANCE,
                )
                # staleness budget keeps even a deferred pulse at least
                # interval_min ahead of the next one
                budget = max(0.0, interval - params.distance.interval_min_ms)
                out.events.append(
                    TrainOut(now, pulse_train, "distance", stale_after_ms=budget)
                )
                state.last_distance_t = now
            return

        if state.phase is Phase.ADJUSTING:
            j = state.phase_waypoint
            steer = _steer_vertex(pose, route, j + 1, params.reach_radius_m)
            dev = _deviation_to_vertex(pose, route, steer)
            if dev is None or abs(dev) <= params.align_tol_deg:
                out.events.append(
                    TrainOut(
                        now, success_signal(params.direction, mode.channel), "success"
                    )
                )
                out.events.append(StateOut(now, Phase.FOLLOWING, j))
                state.phase = Phase.FOLLOWING
                state.phase_waypoint = None
                state.segment_hint = max(state.segment_hint, j)
                state.next_event_idx = _next_event_index(route, j)
                state.steer_target_idx = j + 1
                state.off_course_since = None
                continue
            _emit_direction(state, out, mode, params, now, dev)
            return

        if state.phase is Phase.OFF_COURSE:
            steer = _steer_vertex(pose, route, seg + 1, params.reach_radius_m)
            dev = _deviation_to_vertex(pose, route, steer)
            if dev is None or abs(dev) <= params.align_tol_deg:
                out.events.append(
                    TrainOut(
                        now, success_signal(params.direction, mode.channel), "success"
                    )
                )
                out.events.append(StateOut(now, Phase.FOLLOWING, seg))
                state.phase = Phase.FOLLOWING
                state.off_course_since = None
                continue
            _emit_direction(state, out, mode, params, now, dev)
            return
    raise RuntimeError("guidance transition loop did not settle")


def _single_pulse(length_ms: float, channel: Channel) -> Pulse:
    return Pulse(length_ms, 0.0, channel)


def _step_compass(state, pose, route, mode, params, out, seg, along):
    now = pose.t
    dest = route.destination_index
    cum = route.cumulative_lengths
    remaining_dest = max(cum[dest] - (cum[seg] + along), 0.0)

    # advance the steering target past every vertex we are standing on
    while state.steer_target_idx < dest:
        k = state.steer_target_idx
        target = route.waypoints[k].point
        if (
            target.floor == pose.position.floor
            and pose.position.distance_to(target) <= params.reach_radius_m
        ):
            if (
                route.waypoints[k].kind is WaypointKind.JUNCTION
                and mode.voice_enabled
            ):
                _emit_voice(out, now, GuidanceEvent.AT_TURN, turn=route_turn(route, k))
            state.steer_target_idx = k + 1
        else:
            break
    state.steer_target_idx = max(state.steer_target_idx, seg + 1)

    if state.steer_target_idx >= dest and _reached(
        pose, route, dest, remaining_dest, params.reach_radius_m
    ):
        _arrive(state, out, mode, now, dest)
        return

    dev = _deviation_to_vertex(pose, route, state.steer_target_idx)
    if dev is None:
        return
    interval = compass_interval(dev, params.compass)
    if interval is not None and now - state.last_compass_t >= interval / 1000.0:
        train = PulseTrain(
            (_single_pulse(params.compass.pulse_length_ms, mode.channel),),
            Meaning.PING,
        )
        out.events.append(TrainOut(now, train, "compass"))
        state.last_compass_t = now
