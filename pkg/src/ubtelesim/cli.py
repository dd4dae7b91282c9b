"""Command-line entry point.

Subcommands: run, replay, report, sweep, serve. Every error path exits
nonzero and prints one JSON diagnostic object to stderr, so wrappers can
parse failures without scraping prose.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .config import (OperatorMode, Scenario, SessionConfig, load_config,
                     object_by_label)
from .errors import ConfigError, SchemaError, UbteleError
from .metrics import render_table
from .plant import ObjectLabel
from .session import (log_summary_row, replay, run_session,
                      sinusoid_tracking_error, summary_row)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _fail(code: int, error: str, **details) -> int:
    payload = {"error": error}
    payload.update(details)
    print(json.dumps(payload), file=sys.stderr)
    return code


def _load_base_config(args) -> SessionConfig:
    config = load_config(args.config) if args.config else SessionConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "scenario", None) is not None:
        overrides["scenario"] = Scenario(args.scenario)
    if getattr(args, "operator", None) is not None:
        overrides["operator"] = OperatorMode(args.operator)
    if getattr(args, "duration", None) is not None:
        overrides["duration_s"] = args.duration
    if getattr(args, "object", None) is not None:
        overrides["object"] = object_by_label(
            ObjectLabel(args.object), config.object.contact_angle)
    return config.replace(**overrides) if overrides else config


def _cmd_run(args) -> int:
    config = _load_base_config(args)
    out_path = args.out
    if args.gzip and out_path is not None and not out_path.endswith(".gz"):
        out_path += ".gz"
    result = run_session(config, out_path=out_path, realtime=args.realtime)
    summary = result.summary
    out = {
        "log": result.path,
        "tick_count": result.trace.tick_count,
        "summary": summary.to_dict() if summary else None,
        "fault": result.fault,
    }
    print(json.dumps(out))
    if result.fault is not None:
        return _fail(EXIT_RUNTIME, "simulation fault", reason=result.fault,
                     tick=result.trace.fault_tick)
    return EXIT_OK


def _cmd_replay(args) -> int:
    report = replay(args.log)
    print(json.dumps({
        "ok": report.ok,
        "ticks_checked": report.ticks_checked,
        "divergence_tick": report.divergence_tick,
        "message": report.message,
    }))
    if not report.ok:
        return _fail(EXIT_RUNTIME, "replay divergence",
                     tick=report.divergence_tick, message=report.message)
    return EXIT_OK


def _cmd_report(args) -> int:
    rows = []
    for path in args.log:
        row = log_summary_row(path)
        if row is None:
            return _fail(EXIT_RUNTIME, "log has no band summary", log=path)
        rows.append(row)
    rows.sort(key=lambda r: (r.task, r.obj, r.method))
    sys.stdout.write(render_table(rows))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row.to_dict(), separators=(",", ":")) + "\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_base_config(args)
    try:
        latencies = [float(x) for x in args.latencies.split(",") if x.strip()]
    except ValueError:
        return _fail(EXIT_CONFIG, "invalid --latencies list", value=args.latencies)
    if not latencies:
        return _fail(EXIT_CONFIG, "empty --latencies list")
    results = []
    for latency in latencies:
        rms = sinusoid_tracking_error(config, latency_ms=latency,
                                      duration_s=args.duration)
        results.append({"latency_ms": latency, "tracking_rms_rad": rms})
    print(f"{'latency [ms]':>12}  {'tracking RMS [rad]':>18}")
    for row in results:
        print(f"{row['latency_ms']:12.1f}  {row['tracking_rms_rad']:18.6f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .server import serve_session

    config = _load_base_config(args)

    def announce(handles):
        endpoints = {"ndjson_port": handles.ndjson_port, "ws_port": handles.ws_port}
        if args.console_dir:
            endpoints["http_port"] = args.http_port
        print(json.dumps({"serving": endpoints}), flush=True)

    try:
        result = serve_session(
            config, out_path=args.out, realtime=args.realtime,
            enable_ndjson=not args.no_ndjson, enable_ws=not args.no_ws,
            console_dir=args.console_dir, http_port=args.http_port,
            handles_ready=announce,
        )
    except KeyboardInterrupt:
        return EXIT_OK
    if result.fault is not None:
        return _fail(EXIT_RUNTIME, "simulation fault", reason=result.fault)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ubtelesim",
        description="Leader-follower underwater teleoperation simulator "
                    "with a torque-band indicator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_out=True, with_duration=True):
        p.add_argument("--config", help="YAML session config")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--scenario", choices=[s.value for s in Scenario])
        p.add_argument("--operator", choices=[m.value for m in OperatorMode])
        if with_duration:
            p.add_argument("--duration", type=float, help="override duration (s)")
        p.add_argument("--object", choices=[o.value for o in ObjectLabel])
        if with_out:
            p.add_argument("--out", help="output path")

    p = sub.add_parser("run", help="run one session and write a JSONL log")
    common(p)
    p.add_argument("--realtime", action="store_true",
                   help="pace ticks against the wall clock")
    p.add_argument("--gzip", action="store_true",
                   help="compress the log (appends .gz if needed)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("replay", help="verify a session log end-to-end")
    p.add_argument("--log", required=True)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("report", help="render band-metric tables from logs")
    p.add_argument("--log", action="append", required=True,
                   help="session log (repeatable)")
    p.add_argument("--out", help="also write rows as JSON lines")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("sweep", help="tracking error vs link latency")
    common(p, with_duration=False)
    p.add_argument("--latencies", default="0,5,10,20",
                   help="comma-separated one-way latencies in ms")
    p.add_argument("--duration", type=float, default=6.0,
                   help="run length per latency point (s)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("serve", help="interactive session with live telemetry")
    common(p)
    p.add_argument("--realtime", dest="realtime", action="store_true", default=True)
    p.add_argument("--no-realtime", dest="realtime", action="store_false")
    p.add_argument("--no-ndjson", action="store_true", help="disable the TCP endpoint")
    p.add_argument("--no-ws", action="store_true", help="disable the WebSocket endpoint")
    p.add_argument("--console-dir", help="serve a static console from this directory")
    p.add_argument("--http-port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "invalid configuration", fields=exc.errors)
    except SchemaError as exc:
        return _fail(EXIT_RUNTIME, "bad session log", message=str(exc))
    except FileNotFoundError as exc:
        return _fail(EXIT_RUNTIME, "file not found", path=str(exc.filename))
    except UbteleError as exc:
        return _fail(EXIT_RUNTIME, exc.__class__.__name__, message=str(exc))


if __name__ == "__main__":
    sys.exit(main())
