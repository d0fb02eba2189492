import math
import random

import pytest

from pulsenav.geometry import Point, Route, Waypoint, WaypointKind
from pulsenav.mapio import load_bundled_map


@pytest.fixture(scope="session")
def ref_doc():
    return load_bundled_map()


@pytest.fixture(scope="session")
def ref_route(ref_doc):
    return ref_doc.routes[0]


def make_route(coords, kinds=None, route_id="r", floor="0"):
    """Build a route from (x, y) pairs; kinds default to plain + destination."""
    n = len(coords)
    if kinds is None:
        kinds = [WaypointKind.PLAIN] * (n - 1) + [WaypointKind.DESTINATION]
    wps = tuple(
        Waypoint(Point(x, y, floor), kind) for (x, y), kind in zip(coords, kinds)
    )
    return Route(route_id, "a", "b", wps)


def drive(route, mode, poses, params=None):
    """Feed a synthetic pose stream through a fresh engine, return its trace.

    poses: iterable of (t, x, y, heading) on the route's first floor, or
    PoseRecord instances.
    """
    from pulsenav.sim import mode_to_dict, replay
    from pulsenav.trace import PoseRecord, SimTrace, TraceHeader

    floor = route.waypoints[0].point.floor
    records = [
        p if isinstance(p, PoseRecord) else PoseRecord(p[0], p[1], p[2], floor, p[3])
        for p in poses
    ]
    header = TraceHeader("synthetic", route.id, mode_to_dict(mode), None, None, None)
    return replay(SimTrace(header, records), route, params)


def random_route(rng: random.Random, max_segments: int = 5) -> Route:
    """Random gentle polyline for projection oracle checks."""
    n_seg = rng.randint(1, max_segments)
    x, y = rng.uniform(-5, 5), rng.uniform(-5, 5)
    heading = rng.uniform(-180, 180)
    coords = [(x, y)]
    for _ in range(n_seg):
        heading += rng.uniform(-70, 70)
        length = rng.uniform(2.0, 10.0)
        x += length * math.sin(math.radians(heading))
        y += length * math.cos(math.radians(heading))
        coords.append((x, y))
    return make_route(coords)
