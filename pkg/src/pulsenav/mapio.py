"""Map documents, destination search, and trace file persistence.

Maps are a single JSON object; traces are JSON Lines with a header line
followed by one event per line. Floats pass through json's repr
round-trip unchanged, so a reloaded trace replays identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .geometry import Point, Route, Waypoint, WaypointKind
from .trace import (
    PoseRecord,
    PulseRecord,
    SimTrace,
    StateRecord,
    TraceHeader,
    VoiceRecord,
)

TRACE_VERSION = 1


class MapParseError(ValueError):
    """The map file is not valid JSON."""


class MapValidationError(ValueError):
    """The map parses but violates the document rules."""


class TraceFormatError(ValueError):
    """A trace file line does not parse or breaks ordering rules."""


class UnsupportedVersionError(TraceFormatError):
    """The trace header declares an unknown format version."""


@dataclass(frozen=True)
class Floor:
    id: str
    width_m: float
    height_m: float
    walls: tuple[tuple[float, float, float, float], ...] = ()


@dataclass(frozen=True)
class Poi:
    id: str
    name: str
    point: Point


@dataclass(frozen=True)
class MapDocument:
    name: str
    floors: tuple[Floor, ...]
    pois: tuple[Poi, ...]
    routes: tuple[Route, ...]

    def floor_ids(self) -> frozenset[str]:
        return frozenset(f.id for f in self.floors)

    def poi(self, poi_id: str) -> Optional[Poi]:
        for p in self.pois:
            if p.id == poi_id:
                return p
        return None

    def find_route(self, from_poi: str, to_poi: str) -> Optional[Route]:
        for r in self.routes:
            if r.from_poi == from_poi and r.to_poi == to_poi:
                return r
        return None


def _kind_to_str(w: Waypoint) -> str:
    if w.kind is WaypointKind.FLOOR_CHANGE and w.via:
        return f"floor_change:{w.via}"
    return w.kind.value


def _kind_from_str(s: str, where: str) -> tuple[WaypointKind, Optional[str]]:
    if s.startswith("floor_change"):
        _, _, via = s.partition(":")
        return WaypointKind.FLOOR_CHANGE, (via or None)
    try:
        return WaypointKind(s), None
    except ValueError:
        raise MapValidationError(f"{where}: unknown waypoint kind {s!r}") from None


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise MapValidationError(f"{where}: missing field {key!r}")
    return obj[key]


def parse_map(text: str, source: str = "<string>") -> MapDocument:
    """Parse and validate a map document from JSON text."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise MapParseError(
            f"{source}: line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise MapValidationError(f"{source}: top level must be a JSON object")

    name = _require(raw, "name", source)
    floors = []
    for fl in _require(raw, "floors", source):
        fid = str(_require(fl, "id", "floor"))
        walls = tuple(
            (float(w[0]), float(w[1]), float(w[2]), float(w[3]))
            for w in fl.get("walls", [])
        )
        floors.append(
            Floor(fid, float(_require(fl, "width_m", f"floor {fid!r}")),
                  float(_require(fl, "height_m", f"floor {fid!r}")), walls)
        )
    floor_ids = {f.id for f in floors}
    if len(floor_ids) != len(floors):
        raise MapValidationError(f"{source}: duplicate floor ids")

    pois = []
    for p in _require(raw, "pois", source):
        pid = str(_require(p, "id", "poi"))
        where = f"poi {pid!r}"
        pfloor = str(_require(p, "floor", where))
        if pfloor not in floor_ids:
            raise MapValidationError(f"{where}: unknown floor {pfloor!r}")
        pois.append(
            Poi(pid, str(_require(p, "name", where)),
                Point(float(_require(p, "x", where)), float(_require(p, "y", where)), pfloor))
        )
    poi_ids = {p.id for p in pois}
    if len(poi_ids) != len(pois):
        raise MapValidationError(f"{source}: duplicate poi ids")

    routes = []
    for r in _require(raw, "routes", source):
        rid = str(_require(r, "id", "route"))
        where = f"route {rid!r}"
        frm = str(_require(r, "from", where))
        to = str(_require(r, "to", where))
        for endpoint in (frm, to):
            if endpoint not in poi_ids:
                raise MapValidationError(f"{where}: unknown poi {endpoint!r}")
        waypoints = []
        for i, w in enumerate(_require(r, "waypoints", where)):
            wwhere = f"{where} waypoint {i}"
            wfloor = str(_require(w, "floor", wwhere))
            if wfloor not in floor_ids:
                raise MapValidationError(f"{wwhere}: unknown floor {wfloor!r}")
            kind, via = _kind_from_str(str(w.get("kind", "plain")), wwhere)
            waypoints.append(
                Waypoint(
                    Point(float(_require(w, "x", wwhere)), float(_require(w, "y", wwhere)), wfloor),
                    kind,
                    w.get("label"),
                    via,
                )
            )
        try:
            routes.append(Route(rid, frm, to, tuple(waypoints)))
        except ValueError as e:
            raise MapValidationError(f"{where}: {e}") from None
    if not routes:
        raise MapValidationError(f"{source}: document must contain at least one route")
    return MapDocument(str(name), tuple(floors), tuple(pois), tuple(routes))


def load_map(path: Union[str, Path]) -> MapDocument:
    """Load and validate a map document from a JSON file."""
    path = Path(path)
    return parse_map(path.read_text(encoding="utf-8"), source=str(path))


def map_to_dict(doc: MapDocument) -> dict:
    return {
        "name": doc.name,
        "floors": [
            {
                "id": f.id,
                "width_m": f.width_m,
                "height_m": f.height_m,
                "walls": [list(w) for w in f.walls],
            }
            for f in doc.floors
        ],
        "pois": [
            {"id": p.id, "name": p.name, "x": p.point.x, "y": p.point.y, "floor": p.point.floor}
            for p in doc.pois
        ],
        "routes": [
            {
                "id": r.id,
                "from": r.from_poi,
                "to": r.to_poi,
                "waypoints": [
                    {
                        "x": w.point.x,
                        "y": w.point.y,
                        "floor": w.point.floor,
                        "kind": _kind_to_str(w),
                        **({"label": w.label} if w.label is not None else {}),
                    }
                    for w in r.waypoints
                ],
            }
            for r in doc.routes
        ],
    }


def save_map(doc: MapDocument, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(map_to_dict(doc), indent=2) + "\n", encoding="utf-8"
    )


def bundled_map_path() -> Path:
    """Path of the reference building map shipped with the package."""
    with resources.as_file(
        resources.files("pulsenav").joinpath("data/reference_map.json")
    ) as p:
        return Path(p)


def load_bundled_map() -> MapDocument:
    return load_map(bundled_map_path())


def search_destinations(
    doc: MapDocument, query: str = "", recents: Sequence[str] = ()
) -> list[Poi]:
    """Destination catalog ordering.

    Empty query: recents first (most recent first), then everything else
    alphabetically. Non-empty query: case-insensitive substring filter on
    names, alphabetical.
    """
    if query:
        q = query.lower()
        hits = [p for p in doc.pois if q in p.name.lower()]
        return sorted(hits, key=lambda p: (p.name.lower(), p.id))
    by_id = {p.id: p for p in doc.pois}
    head = [by_id[r] for r in recents if r in by_id]
    seen = {p.id for p in head}
    tail = sorted(
        (p for p in doc.pois if p.id not in seen),
        key=lambda p: (p.name.lower(), p.id),
    )
    return head + tail


def _header_to_obj(h: TraceHeader) -> dict:
    return {
        "v": h.version,
        "map": h.map_name,
        "route": h.route_id,
        "mode": h.mode,
        "walker": h.walker,
        "seed": h.seed,
        "tick_s": h.tick_s,
    }


def _event_to_obj(e) -> dict:
    if isinstance(e, PoseRecord):
        return {"t": e.t, "kind": "pose", "x": e.x, "y": e.y, "floor": e.floor, "heading": e.heading}
    if isinstance(e, PulseRecord):
        return {
            "t": e.t,
            "kind": "pulse",
            "channel": e.channel,
            "length_ms": e.length_ms,
            "meaning": e.meaning,
            "source": e.source,
        }
    if isinstance(e, VoiceRecord):
        return {"t": e.t, "kind": "voice", "text": e.text}
    if isinstance(e, StateRecord):
        obj = {"t": e.t, "kind": "state", "phase": e.phase, "waypoint": e.waypoint}
        if e.stale_drops is not None:
            obj["stale_drops"] = e.stale_drops
        return obj
    raise TypeError(f"not a trace event: {e!r}")


def _event_from_obj(obj: dict, where: str):
    try:
        kind = obj["kind"]
        if kind == "pose":
            return PoseRecord(obj["t"], obj["x"], obj["y"], obj["floor"], obj["heading"])
        if kind == "pulse":
            return PulseRecord(obj["t"], obj["channel"], obj["length_ms"], obj["meaning"], obj["source"])
        if kind == "voice":
            return VoiceRecord(obj["t"], obj["text"])
        if kind == "state":
            return StateRecord(obj["t"], obj["phase"], obj.get("waypoint"), obj.get("stale_drops"))
    except KeyError as e:
        raise TraceFormatError(f"{where}: missing field {e}") from None
    raise TraceFormatError(f"{where}: unknown event kind {obj.get('kind')!r}")


def trace_to_string(trace: SimTrace) -> str:
    lines = [json.dumps(_header_to_obj(trace.header), separators=(",", ":"))]
    lines.extend(
        json.dumps(_event_to_obj(e), separators=(",", ":")) for e in trace.events
    )
    return "\n".join(lines) + "\n"


def write_trace(trace: SimTrace, path: Union[str, Path]) -> None:
    Path(path).write_text(trace_to_string(trace), encoding="utf-8")


def parse_trace(text: str, source: str = "<string>") -> SimTrace:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise TraceFormatError(f"{source}: empty trace file")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise TraceFormatError(f"{source}: line 1: {e.msg}") from None
    if not isinstance(head, dict) or "v" not in head:
        raise TraceFormatError(f"{source}: line 1: missing header")
    if head["v"] != TRACE_VERSION:
        raise UnsupportedVersionError(
            f"{source}: unsupported trace version {head['v']!r}"
        )
    header = TraceHeader(
        map_name=head.get("map", ""),
        route_id=head.get("route", ""),
        mode=head.get("mode", {}),
        walker=head.get("walker"),
        seed=head.get("seed"),
        tick_s=head.get("tick_s"),
        version=head["v"],
    )
    events = []
    last_t = -float("inf")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        where = f"{source}: line {lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceFormatError(f"{where}: {e.msg}") from None
        ev = _event_from_obj(obj, where)
        if ev.t < last_t:
            raise TraceFormatError(f"{where}: event time goes backward")
        last_t = ev.t
        events.append(ev)
    return SimTrace(header, events)


def read_trace(path: Union[str, Path]) -> SimTrace:
    path = Path(path)
    return parse_trace(path.read_text(encoding="utf-8"), source=str(path))
