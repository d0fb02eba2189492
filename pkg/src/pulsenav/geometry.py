"""Route and pose geometry for the guidance engine.

Coordinates are floor-local meters (x east, y north). Headings and
bearings are degrees in (-180, 180] with 0 along +y and positive
clockwise, i.e. compass convention. Floors are independent 2-D frames;
a segment whose endpoints sit on different floors has zero length and
no bearing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional


class DegenerateGeometryError(ValueError):
    """A direction was requested between coincident points."""


def normalize_angle(a: float) -> float:
    """Wrap an angle in degrees into (-180, 180]."""
    if not math.isfinite(a):
        raise ValueError(f"non-finite angle: {a!r}")
    r = a % 360.0
    if r > 180.0:
        r -= 360.0
    return r


@dataclass(frozen=True)
class Point:
    x: float
    y: float
    floor: str = "0"

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")

    def distance_to(self, other: "Point") -> float:
        if other.floor != self.floor:
            raise ValueError(
                f"points on different floors: {self.floor!r} vs {other.floor!r}"
            )
        return math.hypot(other.x - self.x, other.y - self.y)


def bearing(origin: Point, target: Point) -> float:
    """Compass bearing from origin to target."""
    if origin.floor != target.floor:
        raise ValueError(
            f"bearing across floors: {origin.floor!r} vs {target.floor!r}"
        )
    dx = target.x - origin.x
    dy = target.y - origin.y
    if dx == 0.0 and dy == 0.0:
        raise DegenerateGeometryError("bearing undefined for coincident points")
    return normalize_angle(math.degrees(math.atan2(dx, dy)))


@dataclass(frozen=True)
class Pose:
    """Timestamped position and heading of the pedestrian."""

    position: Point
    heading: float
    t: float

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ValueError(f"non-finite time: {self.t!r}")
        object.__setattr__(self, "heading", normalize_angle(self.heading))


class WaypointKind(Enum):
    PLAIN = "plain"
    JUNCTION = "junction"
    DOOR = "door"
    FLOOR_CHANGE = "floor_change"
    DESTINATION = "destination"


@dataclass(frozen=True)
class Waypoint:
    point: Point
    kind: WaypointKind = WaypointKind.PLAIN
    label: Optional[str] = None
    #: "stairs" or "elevator"; only meaningful for floor_change vertices
    via: Optional[str] = None

    def __post_init__(self):
        if self.via is not None:
            if self.kind is not WaypointKind.FLOOR_CHANGE:
                raise ValueError("via is only valid on floor_change waypoints")
            if self.via not in ("stairs", "elevator"):
                raise ValueError(f"unknown floor-change via: {self.via!r}")


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"
    NONE = "none"


@dataclass(frozen=True)
class TurnClassification:
    """A turn quantized to clock hours: 0 is straight, 6 a half turn."""

    clock_hour: int
    side: Side
    angle_deg: float

    def __post_init__(self):
        if not 0 <= self.clock_hour <= 6:
            raise ValueError(f"clock_hour out of range: {self.clock_hour}")
        if (self.side is Side.NONE) != (self.clock_hour == 0):
            raise ValueError("side must be none exactly when clock_hour is 0")
        if not (-180.0 < self.angle_deg <= 180.0):
            raise ValueError(f"angle_deg out of range: {self.angle_deg}")


#: Turns smaller than this (degrees) count as going straight: half of one
#: clock hour, so quantization can never disagree with the straight check.
STRAIGHT_THRESHOLD_DEG = 15.0


def classify_turn(
    incoming_bearing: float,
    outgoing_bearing: float,
    straight_threshold_deg: float = STRAIGHT_THRESHOLD_DEG,
) -> TurnClassification:
    """Classify the heading change between two bearings into clock hours."""
    angle = normalize_angle(normalize_angle(outgoing_bearing) - normalize_angle(incoming_bearing))
    if abs(angle) < straight_threshold_deg:
        return TurnClassification(0, Side.NONE, angle)
    # round half away from zero: plain round() would give hour 0 at 15 deg
    hour = min(6, int(abs(angle) / 30.0 + 0.5))
    side = Side.RIGHT if angle > 0 else Side.LEFT
    return TurnClassification(hour, side, angle)


def classify_deviation(deviation_deg: float) -> TurnClassification:
    """Classify a signed heading deviation as the turn that would fix it."""
    return classify_turn(0.0, deviation_deg)


@dataclass(frozen=True)
class Route:
    """Ordered polyline of waypoints ending at a destination."""

    id: str
    from_poi: str
    to_poi: str
    waypoints: tuple[Waypoint, ...]

    def __post_init__(self):
        wps = tuple(self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if len(wps) < 2:
            raise ValueError(f"route {self.id!r} needs at least 2 waypoints")
        if wps[-1].kind is not WaypointKind.DESTINATION:
            raise ValueError(f"route {self.id!r} must end at a destination waypoint")
        for i in range(len(wps) - 1):
            a, b = wps[i].point, wps[i + 1].point
            if a.floor == b.floor and a.x == b.x and a.y == b.y:
                raise ValueError(
                    f"route {self.id!r}: waypoints {i} and {i + 1} coincide"
                )
        if self.total_length <= 0.0:
            raise ValueError(f"route {self.id!r} has zero length")

    @property
    def n_segments(self) -> int:
        return len(self.waypoints) - 1

    def segment_length(self, i: int) -> float:
        """Length of segment i; zero for cross-floor connectors."""
        a = self.waypoints[i].point
        b = self.waypoints[i + 1].point
        if a.floor != b.floor:
            return 0.0
        return a.distance_to(b)

    def segment_bearing(self, i: int) -> Optional[float]:
        """Bearing of segment i, or None for cross-floor connectors."""
        a = self.waypoints[i].point
        b = self.waypoints[i + 1].point
        if a.floor != b.floor:
            return None
        return bearing(a, b)

    @cached_property
    def cumulative_lengths(self) -> tuple[float, ...]:
        """Along-route position of each vertex, in meters."""
        cum = [0.0]
        for i in range(self.n_segments):
            cum.append(cum[-1] + self.segment_length(i))
        return tuple(cum)

    @property
    def total_length(self) -> float:
        return self.cumulative_lengths[-1]

    @cached_property
    def floors(self) -> frozenset[str]:
        return frozenset(w.point.floor for w in self.waypoints)

    @cached_property
    def junction_indices(self) -> tuple[int, ...]:
        return tuple(
            i for i, w in enumerate(self.waypoints) if w.kind is WaypointKind.JUNCTION
        )

    @cached_property
    def side_indices(self) -> tuple[int, ...]:
        """Vertices announced by voice only: doors and floor changes."""
        return tuple(
            i
            for i, w in enumerate(self.waypoints)
            if w.kind in (WaypointKind.DOOR, WaypointKind.FLOOR_CHANGE)
        )

    @property
    def destination_index(self) -> int:
        return len(self.waypoints) - 1


def route_turn(route: Route, vertex: int) -> TurnClassification:
    """Turn at an interior route vertex from its neighbor segment bearings.

    Cross-floor neighbor segments have no bearing; such vertices classify
    as straight.
    """
    if not 0 < vertex < len(route.waypoints) - 1:
        raise ValueError(f"vertex {vertex} is not interior to route {route.id!r}")
    inc = route.segment_bearing(vertex - 1)
    out = route.segment_bearing(vertex)
    if inc is None or out is None:
        return TurnClassification(0, Side.NONE, 0.0)
    return classify_turn(inc, out)


def signed_deviation(pose: Pose, target: Point) -> float:
    """Signed angle from the pose heading to the bearing of the target.

    Positive means the target is clockwise (to the right) of the heading.
    """
    return normalize_angle(bearing(pose.position, target) - pose.heading)


def project_progress(
    pose: Pose, route: Route, hint: int = 0
) -> tuple[int, float, float]:
    """Locate a pose on the route polyline.

    Searches segments forward from ``hint`` (never backward past it) on
    the pose's floor and picks the one whose clamped orthogonal
    projection is nearest; ties go to the earliest segment.

    Returns:
        (segment index, meters along that segment, distance from the
        pose to the projected point)
    """
    nseg = route.n_segments
    if nseg < 1:
        raise ValueError("route has no segments")
    if not 0 <= hint < nseg:
        raise ValueError(f"hint {hint} out of range for {nseg} segments")
    p = pose.position
    best: Optional[tuple[int, float, float]] = None
    for i in range(hint, nseg):
        a = route.waypoints[i].point
        b = route.waypoints[i + 1].point
        if a.floor != p.floor or b.floor != a.floor:
            continue
        ax, ay = b.x - a.x, b.y - a.y
        seg_len = math.hypot(ax, ay)
        along = ((p.x - a.x) * ax + (p.y - a.y) * ay) / seg_len
        along = min(max(along, 0.0), seg_len)
        px = a.x + ax * (along / seg_len)
        py = a.y + ay * (along / seg_len)
        d = math.hypot(p.x - px, p.y - py)
        if best is None or d < best[2]:
            best = (i, along, d)
    if best is None:
        raise ValueError(
            f"no route segment on floor {p.floor!r} at or after segment {hint}"
        )
    return best


def distance_to_waypoint(
    pose: Pose,
    route: Route,
    idx: int,
    progress: Optional[tuple[int, float, float]] = None,
) -> float:
    """Remaining along-route meters from the projected pose to vertex idx."""
    if not 0 <= idx < len(route.waypoints):
        raise ValueError(f"waypoint index {idx} out of range")
    if progress is None:
        progress = project_progress(pose, route)
    seg, along, _ = progress
    if idx <= seg:
        raise ValueError(
            f"waypoint {idx} is behind current progress (segment {seg})"
        )
    cum = route.cumulative_lengths
    return max(cum[idx] - (cum[seg] + along), 0.0)
