"""Command line entry points: serve, simulate, replay, stats."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analytics
from .errors import ConfigurationError, FeedlabError
from .model import Manifest
from .service import Hub, RoomConfig, replay, snapshot_bytes


def load_room_config(config_path=None, manifest_path=None) -> RoomConfig:
    """Room config from a JSON file; the manifest may be inline, referenced
    by path relative to the config file, or given separately."""
    doc = {}
    if config_path is not None:
        with open(config_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    if manifest_path is not None:
        manifest = Manifest.load(manifest_path)
    elif "manifest" in doc:
        ref = doc["manifest"]
        if isinstance(ref, dict):
            manifest = Manifest.from_dict(ref)
        else:
            base = Path(config_path).parent if config_path else Path(".")
            manifest = Manifest.load(base / ref)
    else:
        raise ConfigurationError(
            "no manifest: pass --manifest or set 'manifest' in the config file"
        )
    return RoomConfig.from_dict(doc, manifest)


def _cmd_serve(args) -> int:
    from .server import serve  # optional dependency, import on use

    config = load_room_config(args.config, args.manifest)
    hub = Hub(data_dir=args.data_dir)
    code = hub.create_room(config, code=args.room)
    print(f"room {code} ready; serving on port {args.port}")
    serve(hub, host=args.host, port=args.port)
    return 0


def _cmd_simulate(args) -> int:
    from .simulate import run_classroom

    config = load_room_config(args.config, args.manifest)
    result = run_classroom(
        config,
        data_dir=args.data_dir,
        students=args.students,
        steps=args.steps,
        seed=args.seed,
        room_code=args.room,
    )
    out = args.out or f"{result.room_code}.snapshot.json"
    Path(out).write_bytes(snapshot_bytes(result.snapshot))
    result.hub.close()
    print(f"room {result.room_code}: {result.snapshot['seq']} events")
    print(f"log: {result.log_path}")
    print(f"snapshot: {out}")
    return 0


def _cmd_replay(args) -> int:
    config = load_room_config(args.config, args.manifest)
    snapshot = replay(args.log, config)
    Path(args.out).write_bytes(snapshot_bytes(snapshot))
    print(f"replayed {snapshot['seq']} events from {args.log}")
    print(f"snapshot: {args.out}")
    return 0


def _cmd_stats(args) -> int:
    rows = analytics.load_survey_csv(args.pre) + analytics.load_survey_csv(args.post)
    items = [args.item] if args.item else None
    questions = [args.question] if args.question else None
    report = analytics.build_report(rows, items=items, questions=questions)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"report: {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feedlab",
        description="classroom social-media mechanism simulator and survey toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the websocket room server")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--manifest", help="manifest JSON file")
    p.add_argument("--config", help="room config JSON file")
    p.add_argument("--room", help="fixed room code (default: generated)")
    p.add_argument("--data-dir", default=None, help="log storage root")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("simulate", help="run a seeded simulated classroom")
    p.add_argument("--room", help="fixed room code (default: generated)")
    p.add_argument("--students", type=int, default=30)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", help="manifest JSON file")
    p.add_argument("--config", help="room config JSON file")
    p.add_argument("--out", help="final snapshot output path")
    p.add_argument("--data-dir", default=None, help="log storage root")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("replay", help="replay a recorded log to a snapshot")
    p.add_argument("--log", required=True)
    p.add_argument("--config", help="room config JSON file")
    p.add_argument("--manifest", help="manifest JSON file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("stats", help="pre/post survey analysis report")
    p.add_argument("--pre", required=True, help="pre-test CSV")
    p.add_argument("--post", required=True, help="post-test CSV")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--item", type=int, help="restrict to one Likert item")
    p.add_argument("--question", type=int, help="restrict to one open question")
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FeedlabError as exc:
        print(f"error ({exc.code}): {exc.message}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error (io): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
