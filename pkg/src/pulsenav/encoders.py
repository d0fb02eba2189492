"""Feedback codecs: pulse trains and voice phrases.

Four signal families share one vocabulary of pulses: the continuous
compass cadence (click pace grows with heading deviation, silence means
aligned), distance cadence near a target (parking-sensor style), turn
trains in two flavors (counting-clock and single ping), and the long
milestone pulses (completion, success). Decoders exist so tests and
walker models can read trains back instead of trusting the encoder.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import isfinite
from typing import Optional

from .geometry import Side, TurnClassification, normalize_angle


class Channel(Enum):
    HAPTIC = "haptic"
    AUDIO = "audio"


class Meaning(Enum):
    DIRECTION = "direction"
    DISTANCE = "distance"
    COMPLETION = "completion"
    SUCCESS = "success"
    PING = "ping"


class MalformedTrainError(ValueError):
    """A pulse train does not parse as any known encoding."""


@dataclass(frozen=True)
class Pulse:
    length_ms: float
    gap_after_ms: float = 0.0
    channel: Channel = Channel.HAPTIC

    def __post_init__(self):
        if not (isfinite(self.length_ms) and self.length_ms > 0):
            raise ValueError(f"pulse length must be positive: {self.length_ms}")
        if not (isfinite(self.gap_after_ms) and self.gap_after_ms >= 0):
            raise ValueError(f"pulse gap must be >= 0: {self.gap_after_ms}")


@dataclass(frozen=True)
class PulseTrain:
    pulses: tuple[Pulse, ...]
    meaning: Meaning

    def __post_init__(self):
        pulses = tuple(self.pulses)
        object.__setattr__(self, "pulses", pulses)
        if not pulses:
            raise ValueError("pulse train must contain at least one pulse")
        if len({p.channel for p in pulses}) != 1:
            raise ValueError("all pulses in a train must share one channel")

    @property
    def channel(self) -> Channel:
        return self.pulses[0].channel

    @property
    def duration_ms(self) -> float:
        """Span from first pulse start to the end of the trailing gap."""
        return sum(p.length_ms + p.gap_after_ms for p in self.pulses)


@dataclass(frozen=True)
class CompassConfig:
    """Continuous cadence: fastest clicks at a half-turn deviation."""

    dead_zone_deg: float = 10.0
    interval_max_ms: float = 1000.0
    interval_min_ms: float = 150.0
    pulse_length_ms: float = 60.0
    channel: Channel = Channel.HAPTIC

    def __post_init__(self):
        if not 0.0 <= self.dead_zone_deg < 180.0:
            raise ValueError(f"dead zone out of [0, 180): {self.dead_zone_deg}")
        if not 0 < self.interval_min_ms < self.interval_max_ms:
            raise ValueError("need 0 < interval_min_ms < interval_max_ms")
        if self.pulse_length_ms <= 0:
            raise ValueError("pulse_length_ms must be positive")


@dataclass(frozen=True)
class DistanceConfig:
    """Event cadence near a target: shorter intervals when closer."""

    trigger_distance_m: float = 10.0
    slope_ms_per_m: float = 100.0
    interval_min_ms: float = 250.0
    interval_max_ms: float = 1250.0
    pulse_length_ms: float = 80.0

    def __post_init__(self):
        if self.trigger_distance_m <= 0:
            raise ValueError("trigger_distance_m must be positive")
        if not 0 < self.interval_min_ms < self.interval_max_ms:
            raise ValueError("need 0 < interval_min_ms < interval_max_ms")
        if self.slope_ms_per_m <= 0:
            raise ValueError("slope_ms_per_m must be positive")
        if self.pulse_length_ms <= 0:
            raise ValueError("pulse_length_ms must be positive")


class DirectionOption(Enum):
    A_COUNTING_CLOCK = "A"
    B_PING = "B"


@dataclass(frozen=True)
class DirectionConfig:
    """Turn trains: pulse length carries the side, pulse count the angle."""

    short_pulse_ms: float = 120.0
    long_pulse_ms: float = 450.0
    inter_pulse_gap_ms: float = 250.0
    success_pulse_ms: float = 900.0
    post_signal_gap_ms: float = 600.0
    option: DirectionOption = DirectionOption.A_COUNTING_CLOCK

    def __post_init__(self):
        if not 0 < self.short_pulse_ms < self.long_pulse_ms < self.success_pulse_ms:
            raise ValueError("need short < long < success pulse lengths")
        if self.inter_pulse_gap_ms <= 0 or self.post_signal_gap_ms <= 0:
            raise ValueError("gaps must be positive")


DEFAULT_COMPASS = CompassConfig()
DEFAULT_DISTANCE = DistanceConfig()
DEFAULT_DIRECTION = DirectionConfig()


def compass_interval(
    deviation_deg: float, cfg: CompassConfig = DEFAULT_COMPASS
) -> Optional[float]:
    """Click interval in ms for a heading deviation, or None inside the dead zone.

    Linear from interval_max at the dead-zone edge down to interval_min
    at 180 degrees.
    """
    if not -180.0 < deviation_deg <= 180.0:
        raise ValueError(f"deviation out of (-180, 180]: {deviation_deg!r}")
    mag = abs(deviation_deg)
    if mag <= cfg.dead_zone_deg:
        return None
    span = 180.0 - cfg.dead_zone_deg
    frac = (mag - cfg.dead_zone_deg) / span
    return cfg.interval_max_ms - (cfg.interval_max_ms - cfg.interval_min_ms) * frac


def distance_interval(
    remaining_m: float, cfg: DistanceConfig = DEFAULT_DISTANCE
) -> Optional[float]:
    """Pulse interval in ms for a remaining distance, or None beyond the trigger."""
    if not (isfinite(remaining_m) and remaining_m >= 0.0):
        raise ValueError(f"remaining distance must be >= 0: {remaining_m!r}")
    if remaining_m > cfg.trigger_distance_m:
        return None
    raw = cfg.interval_min_ms + cfg.slope_ms_per_m * remaining_m
    return min(max(raw, cfg.interval_min_ms), cfg.interval_max_ms)


def encode_direction_A(
    turn: TurnClassification,
    cfg: DirectionConfig = DEFAULT_DIRECTION,
    channel: Channel = Channel.HAPTIC,
) -> PulseTrain:
    """Counting-clock train: clock_hour pulses, long for right, short for left."""
    if turn.clock_hour < 1:
        raise ValueError("straight has no direction signal")
    length = cfg.long_pulse_ms if turn.side is Side.RIGHT else cfg.short_pulse_ms
    pulses = tuple(
        Pulse(
            length_ms=length,
            gap_after_ms=cfg.inter_pulse_gap_ms if i < turn.clock_hour - 1 else 0.0,
            channel=channel,
        )
        for i in range(turn.clock_hour)
    )
    return PulseTrain(pulses, Meaning.DIRECTION)


def encode_direction_B(
    cfg: DirectionConfig = DEFAULT_DIRECTION,
    channel: Channel = Channel.HAPTIC,
) -> PulseTrain:
    """Single short ping prompting rotation; carries no angle or side."""
    return PulseTrain((Pulse(cfg.short_pulse_ms, 0.0, channel),), Meaning.PING)


def _milestone(meaning: Meaning, cfg: DirectionConfig, channel: Channel) -> PulseTrain:
    # trailing gap is mandatory silence, enforced by the scheduler busy window
    pulse = Pulse(cfg.success_pulse_ms, cfg.post_signal_gap_ms, channel)
    return PulseTrain((pulse,), meaning)


def success_signal(
    cfg: DirectionConfig = DEFAULT_DIRECTION, channel: Channel = Channel.HAPTIC
) -> PulseTrain:
    """Notably long pulse confirming correct orientation."""
    return _milestone(Meaning.SUCCESS, cfg, channel)


def completion_signal(
    cfg: DirectionConfig = DEFAULT_DIRECTION, channel: Channel = Channel.HAPTIC
) -> PulseTrain:
    """Notably long pulse marking a distance target reached."""
    return _milestone(Meaning.COMPLETION, cfg, channel)


def decode_direction_A(
    train: PulseTrain, cfg: DirectionConfig = DEFAULT_DIRECTION
) -> TurnClassification:
    """Inverse of encode_direction_A on (clock_hour, side)."""
    if train.meaning is not Meaning.DIRECTION:
        raise MalformedTrainError(f"not a direction train: {train.meaning.value}")
    n = len(train.pulses)
    if not 1 <= n <= 6:
        raise MalformedTrainError(f"direction trains carry 1..6 pulses, got {n}")
    lengths = {p.length_ms for p in train.pulses}
    if len(lengths) != 1:
        raise MalformedTrainError(f"mixed pulse lengths: {sorted(lengths)}")
    (length,) = lengths
    if length == cfg.long_pulse_ms:
        side = Side.RIGHT
    elif length == cfg.short_pulse_ms:
        side = Side.LEFT
    else:
        raise MalformedTrainError(f"pulse length {length} is neither short nor long")
    # representative angle; -180 for six-left normalizes to the interval top
    angle = normalize_angle(float(n * 30 if side is Side.RIGHT else -n * 30))
    return TurnClassification(n, side, angle)


class GuidanceEvent(Enum):
    DEPART = "depart"
    APPROACH_TURN = "approach_turn"
    AT_TURN = "at_turn"
    ADJUST = "adjust"
    ALIGNED = "aligned"
    DOOR = "door"
    FLOOR_CHANGE = "floor_change"
    ARRIVED = "arrived"
    OFF_COURSE = "off_course"


_TURN_EVENTS = frozenset(
    {GuidanceEvent.APPROACH_TURN, GuidanceEvent.AT_TURN, GuidanceEvent.ADJUST}
)


def _turn_phrase(turn: TurnClassification, verb: str = "turn") -> str:
    if turn.side is Side.NONE:
        return "continue straight"
    side = turn.side.value
    if turn.clock_hour == 1:
        return f"{verb} slightly {side}"
    if turn.clock_hour <= 3:
        return f"{verb} {side}"
    return f"{verb} sharp {side}"


def voice_instruction(
    event: GuidanceEvent,
    turn: Optional[TurnClassification] = None,
    distance_m: Optional[float] = None,
) -> str:
    """Short spoken phrase for a guidance event. Deterministic, no fillers."""
    if event in _TURN_EVENTS and turn is None:
        raise ValueError(f"event {event.value} needs a turn classification")
    if event is GuidanceEvent.DEPART:
        return "navigation started"
    if event is GuidanceEvent.APPROACH_TURN:
        if distance_m is None:
            raise ValueError("approach_turn needs a distance")
        meters = int(distance_m + 0.5)
        unit = "meter" if meters == 1 else "meters"
        return f"in {meters} {unit}, {_turn_phrase(turn)}"
    if event is GuidanceEvent.AT_TURN:
        return _turn_phrase(turn)
    if event is GuidanceEvent.ADJUST:
        return _turn_phrase(turn, verb="rotate")
    if event is GuidanceEvent.ALIGNED:
        return "aligned, continue straight"
    if event is GuidanceEvent.DOOR:
        return "door ahead"
    if event is GuidanceEvent.FLOOR_CHANGE:
        return "floor change ahead"
    if event is GuidanceEvent.ARRIVED:
        return "destination reached"
    if event is GuidanceEvent.OFF_COURSE:
        if turn is not None and turn.side is not Side.NONE:
            return f"off course, {_turn_phrase(turn)}"
        return "off course"
    raise ValueError(f"unknown guidance event: {event!r}")
