"""In-memory event log of one guidance session.

Records hold plain strings and floats so a trace is exactly what its
file form says, no more; conversion from engine types happens where the
trace is produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class PoseRecord:
    t: float
    x: float
    y: float
    floor: str
    heading: float


@dataclass(frozen=True)
class PulseRecord:
    t: float
    channel: str
    length_ms: float
    meaning: str
    source: str


@dataclass(frozen=True)
class VoiceRecord:
    t: float
    text: str


@dataclass(frozen=True)
class StateRecord:
    t: float
    phase: str
    waypoint: Optional[int] = None
    #: dropped-as-stale cadence pulse count; set on the terminal record only
    stale_drops: Optional[int] = None


TraceEvent = Union[PoseRecord, PulseRecord, VoiceRecord, StateRecord]


@dataclass(frozen=True)
class TraceHeader:
    map_name: str
    route_id: str
    mode: dict
    walker: Optional[dict]
    seed: Optional[int]
    tick_s: Optional[float]
    version: int = 1


@dataclass
class SimTrace:
    header: TraceHeader
    events: list[TraceEvent] = field(default_factory=list)

    def poses(self) -> Iterator[PoseRecord]:
        return (e for e in self.events if isinstance(e, PoseRecord))

    def pulses(self, source: Optional[str] = None) -> Iterator[PulseRecord]:
        for e in self.events:
            if isinstance(e, PulseRecord) and (source is None or e.source == source):
                yield e

    def voices(self) -> Iterator[VoiceRecord]:
        return (e for e in self.events if isinstance(e, VoiceRecord))

    def states(self, phase: Optional[str] = None) -> Iterator[StateRecord]:
        for e in self.events:
            if isinstance(e, StateRecord) and (phase is None or e.phase == phase):
                yield e

    @property
    def completed(self) -> bool:
        return any(True for _ in self.states("arrived"))

    @property
    def completion_time_s(self) -> Optional[float]:
        arrived = list(self.states("arrived"))
        if not arrived:
            return None
        t0 = next((p.t for p in self.poses()), 0.0)
        return arrived[-1].t - t0

    @property
    def stale_drops(self) -> int:
        for e in reversed(self.events):
            if isinstance(e, StateRecord) and e.stale_drops is not None:
                return e.stale_drops
        return 0

    def validate_times(self) -> None:
        last = -float("inf")
        for i, e in enumerate(self.events):
            if e.t < last:
                raise ValueError(f"event {i} goes back in time: {e.t} < {last}")
            last = e.t
