"""Deterministic indoor guidance engine.

Converts pedestrian pose streams and a route into encoded feedback
(compass click cadence, event-based vibration patterns, voice text),
plus a closed-loop simulator and a session service that verify the
encodings actually steer a walker to the destination.
"""

from .encoders import (
    Channel,
    CompassConfig,
    DirectionConfig,
    DirectionOption,
    DistanceConfig,
    GuidanceEvent,
    MalformedTrainError,
    Meaning,
    Pulse,
    PulseTrain,
    compass_interval,
    completion_signal,
    decode_direction_A,
    distance_interval,
    encode_direction_A,
    encode_direction_B,
    success_signal,
    voice_instruction,
)
from .fsm import GuidanceKind, GuidanceMode, GuidanceState, NavParams, Phase, start, step
from .geometry import (
    DegenerateGeometryError,
    Point,
    Pose,
    Route,
    Side,
    TurnClassification,
    Waypoint,
    WaypointKind,
    bearing,
    classify_turn,
    distance_to_waypoint,
    normalize_angle,
    project_progress,
    signed_deviation,
)
from .mapio import (
    MapDocument,
    MapParseError,
    MapValidationError,
    TraceFormatError,
    UnsupportedVersionError,
    load_bundled_map,
    load_map,
    read_trace,
    search_destinations,
    write_trace,
)
from .scheduler import Emission, PulseScheduler
from .sim import MetricsReport, WalkerKind, WalkerModel, metrics, replay, run
from .trace import SimTrace, TraceHeader

__version__ = "0.1.0"
