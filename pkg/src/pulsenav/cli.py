"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .encoders import (
    DEFAULT_DIRECTION,
    DEFAULT_DISTANCE,
    MalformedTrainError,
    distance_interval,
    encode_direction_A,
    encode_direction_B,
)
from .fsm import GuidanceMode
from .geometry import classify_deviation
from .mapio import (
    MapParseError,
    MapValidationError,
    TraceFormatError,
    load_map,
    read_trace,
    search_destinations,
    write_trace,
)
from .sim import WalkerKind, WalkerModel, metrics, run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

MODE_NAMES = ("compass-haptic", "compass-audio", "event-a", "event-b")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; this tool reserves 2 for
    # validation errors, so remap usage problems to raise instead
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pulsenav", description="Indoor guidance engine tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a closed-loop guided walk")
    p_sim.add_argument("--map", required=True, dest="map_path")
    p_sim.add_argument("--from", required=True, dest="from_poi")
    p_sim.add_argument("--to", required=True, dest="to_poi")
    p_sim.add_argument("--mode", required=True, choices=MODE_NAMES)
    p_sim.add_argument("--voice", action="store_true")
    p_sim.add_argument("--walker", required=True, choices=("ideal", "reactive"))
    p_sim.add_argument("--speed", type=float, default=1.2)
    p_sim.add_argument("--latency", type=float, default=0.6)
    p_sim.add_argument("--noise", type=float, default=3.0)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--tick", type=float, default=0.1)
    p_sim.add_argument("--timeout", type=float, default=600.0)
    p_sim.add_argument("--out", required=True, dest="out_path")

    p_enc = sub.add_parser("encode", help="print an encoded signal")
    enc_sub = p_enc.add_subparsers(dest="what", required=True)
    p_dir = enc_sub.add_parser("direction")
    p_dir.add_argument("--angle", type=float, required=True)
    p_dir.add_argument("--option", choices=("A", "B"), default="A")
    p_dist = enc_sub.add_parser("distance")
    p_dist.add_argument("--remaining", type=float, required=True)

    p_met = sub.add_parser("metrics", help="print a trace quality report")
    p_met.add_argument("trace_path")
    p_met.add_argument("--map", dest="map_path")

    p_dst = sub.add_parser("destinations", help="list or search destinations")
    p_dst.add_argument("--map", required=True, dest="map_path")
    p_dst.add_argument("--query", default="")
    p_dst.add_argument("--recent", action="append", default=[], dest="recents")

    p_srv = sub.add_parser("serve", help="run the guidance session service")
    p_srv.add_argument("--map", required=True, dest="map_path")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--static", dest="static_dir")

    return parser


def _cmd_simulate(args) -> int:
    doc = load_map(args.map_path)
    route = doc.find_route(args.from_poi, args.to_poi)
    if route is None:
        raise MapValidationError(
            f"no route from {args.from_poi!r} to {args.to_poi!r} in {doc.name!r}"
        )
    mode = GuidanceMode.from_string(args.mode, voice=args.voice)
    walker = WalkerModel(
        kind=WalkerKind(args.walker),
        speed_mps=args.speed,
        reaction_latency_s=args.latency,
        heading_noise_deg_std=args.noise,
        rng_seed=args.seed,
    )
    trace = run(
        route,
        walker,
        mode,
        tick_s=args.tick,
        timeout_s=args.timeout,
        map_name=doc.name,
    )
    write_trace(trace, args.out_path)
    summary = {
        "completed": trace.completed,
        "events": len(trace.events),
        "out": args.out_path,
    }
    if trace.completion_time_s is not None:
        summary["completion_time_s"] = trace.completion_time_s
    print(json.dumps(summary))
    return EXIT_OK


def _train_to_obj(train) -> dict:
    return {
        "meaning": train.meaning.value,
        "channel": train.channel.value,
        "pulses": [
            {"length_ms": p.length_ms, "gap_after_ms": p.gap_after_ms}
            for p in train.pulses
        ],
    }


def _cmd_encode(args) -> int:
    if args.what == "direction":
        if args.option == "B":
            train = encode_direction_B(DEFAULT_DIRECTION)
        else:
            turn = classify_deviation(args.angle)
            if turn.clock_hour == 0:
                raise MalformedTrainError(
                    f"angle {args.angle} is below the turn threshold; nothing to encode"
                )
            train = encode_direction_A(turn, DEFAULT_DIRECTION)
        print(json.dumps(_train_to_obj(train)))
    else:
        interval = distance_interval(args.remaining, DEFAULT_DISTANCE)
        print(json.dumps({"remaining_m": args.remaining, "interval_ms": interval}))
    return EXIT_OK


def _cmd_metrics(args) -> int:
    trace = read_trace(args.trace_path)
    if args.map_path:
        doc = load_map(args.map_path)
    else:
        from .mapio import load_bundled_map

        doc = load_bundled_map()
    route = next((r for r in doc.routes if r.id == trace.header.route_id), None)
    if route is None:
        raise MapValidationError(
            f"route {trace.header.route_id!r} not found in map {doc.name!r}"
        )
    print(json.dumps(metrics(trace, route).to_dict()))
    return EXIT_OK


def _cmd_destinations(args) -> int:
    doc = load_map(args.map_path)
    pois = search_destinations(doc, args.query, args.recents)
    print(json.dumps([{"id": p.id, "name": p.name} for p in pois]))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    doc = load_map(args.map_path)
    app = create_app(doc, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "encode": _cmd_encode,
    "metrics": _cmd_metrics,
    "destinations": _cmd_destinations,
    "serve": _cmd_serve,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (MapParseError, MapValidationError, TraceFormatError, MalformedTrainError, ValueError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
