"""Turns pulse trains into timestamped emissions against an injected clock.

One scheduler per guidance session. The caller supplies every timestamp
(simulation ticks or a wall-clock mapping); the scheduler never reads
ambient time, so simulated and real-time runs of the same decisions
produce identical emission sequences.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass
from typing import Optional

from .encoders import Channel, Meaning, PulseTrain


@dataclass(frozen=True)
class Emission:
    t_start: float
    length_ms: float
    channel: Channel
    meaning: Meaning
    source: str


class PulseScheduler:
    """Expands enqueued trains into non-overlapping per-channel emissions.

    A train landing on a busy channel is deferred to the end of the busy
    interval, except trains enqueued with a staleness budget (distance
    cadence), which are dropped instead: a late cadence pulse carries
    outdated information.
    """

    def __init__(self):
        self._now = 0.0
        self._pending: list[Emission] = []
        self._busy_until: dict[Channel, float] = {ch: 0.0 for ch in Channel}
        self.stale_drops = 0

    @property
    def now(self) -> float:
        return self._now

    def enqueue(
        self,
        train: PulseTrain,
        at: float,
        source: str,
        stale_after_ms: Optional[float] = None,
    ) -> bool:
        """Schedule a train at time ``at`` (seconds). Returns False if dropped."""
        if at < self._now:
            raise ValueError(f"enqueue into the past: {at} < {self._now}")
        ch = train.channel
        start = max(at, self._busy_until[ch])
        if stale_after_ms is not None and start - at > stale_after_ms / 1000.0:
            self.stale_drops += 1
            return False
        cursor = start
        for p in train.pulses:
            insort(
                self._pending,
                Emission(cursor, p.length_ms, ch, train.meaning, source),
                key=lambda e: e.t_start,
            )
            cursor += (p.length_ms + p.gap_after_ms) / 1000.0
        # the trailing gap (success/completion silence) keeps the channel busy
        self._busy_until[ch] = cursor
        return True

    def drain_due(self, now: float) -> list[Emission]:
        """Return every emission with t_start <= now, in order, exactly once."""
        if now < self._now:
            raise ValueError(f"clock regression: {now} < {self._now}")
        self._now = now
        i = 0
        while i < len(self._pending) and self._pending[i].t_start <= now:
            i += 1
        due = self._pending[:i]
        del self._pending[:i]
        return due

    def pending_count(self) -> int:
        return len(self._pending)
