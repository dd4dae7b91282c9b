"""Session orchestration: wiring a config into a run, JSONL logging, replay.

A session log is JSON lines: one header record carrying the schema version
and the fully resolved config, one record per tick, and one summary footer.
Everything needed to re-derive the indicator outputs and the band metrics is
in the log, so `replay` can verify a log end-to-end with zero tolerance.
"""

from __future__ import annotations

import gzip
import json
import queue
from dataclasses import dataclass
from typing import IO, List, Optional, Tuple

from . import rti as rti_mod
from .config import (OperatorMode, SessionConfig, config_from_dict,
                     derive_rng, derive_seed)
from .errors import SchemaError
from .joints import GRIPPER
from .link import Channel
from .loop import BilateralPipeline, SessionTrace, TickRecord, run_tick_loop
from .metrics import BandSummary, SummaryRow, band_summary, trace_from_arrays
from .operators import (MARKER_GRASP_START, MARKER_LIFT_START, MARKER_RELEASE,
                        InteractiveOperator, ScriptedOperator)
from .plant import no_object

SCHEMA_VERSION = 1

# rng stream ids per component (splittable seeding)
_STREAM_OPERATOR = 0
_STREAM_TO_FOLLOWER = 1
_STREAM_TO_LEADER = 2


def method_label(mode: OperatorMode) -> str:
    return {
        OperatorMode.SCRIPTED_BASELINE: "baseline",
        OperatorMode.SCRIPTED_RTI_AWARE: "rti-aware",
        OperatorMode.INTERACTIVE: "interactive",
    }[mode]


def build_operator(config: SessionConfig, command_queue=None):
    if config.operator is OperatorMode.INTERACTIVE:
        return InteractiveOperator(config.operator_model,
                                   command_queue if command_queue is not None else queue.Queue())
    return ScriptedOperator(
        scenario=config.scenario,
        mode=config.operator,
        params=config.operator_model,
        rti_config=config.rti,
        duration_s=config.duration_s,
        rng=derive_rng(config.seed, _STREAM_OPERATOR),
    )


def build_pipeline(config: SessionConfig, operator=None, command_queue=None) -> BilateralPipeline:
    if operator is None:
        operator = build_operator(config, command_queue)
    return BilateralPipeline(
        operator=operator,
        leader_params=config.leader_arm,
        follower_params=config.follower_arm,
        grasped_object=config.object,
        gains=config.gains,
        rtob_params=config.rtob,
        rti_config=config.rti,
        to_follower=Channel(config.channel_to_follower.resolve(
            derive_seed(config.seed, _STREAM_TO_FOLLOWER))),
        to_leader=Channel(config.channel_to_leader.resolve(
            derive_seed(config.seed, _STREAM_TO_LEADER))),
    )


def simulate(config: SessionConfig, keep_records: bool = False,
             on_record=None, operator=None) -> SessionTrace:
    """Run one session in memory (no log file)."""
    pipeline = build_pipeline(config, operator=operator)
    return run_tick_loop(pipeline, config.duration_s,
                         keep_records=keep_records, on_record=on_record)


def trial_window(trace: SessionTrace) -> Optional[Tuple[int, int]]:
    """Metric window [grasp-start, release) in ticks, if the markers exist."""
    start = trace.marker_tick(MARKER_GRASP_START)
    if start is None:
        return None
    end = trace.marker_tick(MARKER_RELEASE)
    if end is None or end <= start:
        end = trace.tick_count
    return (start, end)


def hold_window(trace: SessionTrace) -> Optional[Tuple[int, int]]:
    """Steady hold sub-window [lift-start, release), if marked."""
    start = trace.marker_tick(MARKER_LIFT_START)
    if start is None:
        return None
    end = trace.marker_tick(MARKER_RELEASE)
    if end is None or end <= start:
        end = trace.tick_count
    return (start, end)


def window_summary(trace: SessionTrace, config: SessionConfig,
                   window: Optional[Tuple[int, int]] = None) -> Optional[BandSummary]:
    """Band summary of the follower gripper estimate over the trial window."""
    if window is None:
        window = trial_window(trace)
    if window is None:
        return None
    start, end = window
    torques = trace.grip_torque[start:end]
    if len(torques) == 0:
        return None
    timestamps = [t * round(trace.dt * 1e6) for t in range(start, end)]
    trace_obj = trace_from_arrays(timestamps, torques)
    return band_summary(trace_obj, config.rti)


def summary_row(trace: SessionTrace, config: SessionConfig) -> Optional[SummaryRow]:
    summary = window_summary(trace, config)
    if summary is None:
        return None
    return SummaryRow(
        task=config.scenario.value,
        obj=config.object.label.value,
        method=method_label(config.operator),
        summary=summary,
    )


def record_to_dict(record: TickRecord) -> dict:
    out = {
        "type": "tick",
        "tick": record.tick,
        "t_us": record.t_us,
        "leader": {
            "angle": list(record.leader.angle),
            "velocity": list(record.leader.velocity),
            "motor": list(record.leader.motor_torque),
            "tau_hat": list(record.leader.tau_hat),
        },
        "follower": {
            "angle": list(record.follower.angle),
            "velocity": list(record.follower.velocity),
            "motor": list(record.follower.motor_torque),
            "tau_hat": list(record.follower.tau_hat),
        },
        "rti": {
            "fill": record.indicator.fill_percent,
            "color": list(record.indicator.color),
            "zone": record.indicator.zone.value,
        },
        "events": list(record.events),
    }
    if record.markers:
        out["markers"] = list(record.markers)
    return out


def _open_log(path: str, mode: str) -> IO[str]:
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


@dataclass
class SessionResult:
    path: Optional[str]
    trace: SessionTrace
    summary: Optional[BandSummary]
    config: SessionConfig

    @property
    def fault(self) -> Optional[str]:
        return self.trace.fault


def run_session(config: SessionConfig, out_path: Optional[str] = None,
                realtime: bool = False, operator=None,
                command_queue=None, on_record=None,
                should_stop=None) -> SessionResult:
    """Execute one session, optionally writing a JSONL (or .gz) log."""
    pipeline = build_pipeline(config, operator=operator, command_queue=command_queue)
    fh: Optional[IO[str]] = None
    try:
        writer = None
        if out_path is not None:
            fh = _open_log(out_path, "w")
            header = {"type": "header", "schema_version": SCHEMA_VERSION,
                      "config": config.to_dict()}
            fh.write(json.dumps(header, separators=(",", ":")) + "\n")

            def writer(record: TickRecord, _fh=fh):
                _fh.write(json.dumps(record_to_dict(record), separators=(",", ":")) + "\n")

        def emit(record: TickRecord):
            if writer is not None:
                writer(record)
            if on_record is not None:
                on_record(record)

        trace = run_tick_loop(
            pipeline, config.duration_s,
            on_record=emit if (writer or on_record) else None,
            realtime=realtime, should_stop=should_stop,
        )
        summary = window_summary(trace, config)
        if fh is not None:
            footer = {
                "type": "summary",
                "tick_count": trace.tick_count,
                "markers": [[tick, label] for tick, label in trace.markers],
                "band_summary": summary.to_dict() if summary is not None else None,
                "fault": ({"tick": trace.fault_tick, "reason": trace.fault}
                          if trace.fault is not None else None),
            }
            fh.write(json.dumps(footer, separators=(",", ":")) + "\n")
    finally:
        if fh is not None:
            fh.close()
    return SessionResult(out_path, trace, summary, config)


def read_log(path: str) -> Tuple[dict, List[dict], dict]:
    """Load a session log; returns (header, tick records, footer)."""
    with _open_log(path, "r") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise SchemaError("empty log file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"corrupt header line: {exc}") from exc
    if header.get("type") != "header":
        raise SchemaError("first record is not a header")
    if header.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {header.get('schema_version')!r}")
    try:
        rest = [json.loads(line) for line in lines[1:]]
    except json.JSONDecodeError as exc:
        raise SchemaError(f"corrupt log line: {exc}") from exc
    if not rest or rest[-1].get("type") != "summary":
        raise SchemaError("log is truncated: missing summary footer")
    footer = rest[-1]
    records = rest[:-1]
    if any(r.get("type") != "tick" for r in records):
        raise SchemaError("unexpected record type in log body")
    return header, records, footer


@dataclass
class ReplayReport:
    ok: bool
    ticks_checked: int
    divergence_tick: Optional[int] = None
    message: str = ""

    def __str__(self) -> str:
        if self.ok:
            return f"replay ok: {self.ticks_checked} ticks verified"
        return f"replay FAILED at tick {self.divergence_tick}: {self.message}"


def replay(path: str) -> ReplayReport:
    """Re-derive indicator outputs and the band summary from a log and check
    them against the logged values exactly."""
    header, records, footer = read_log(path)
    config = config_from_dict(header["config"])

    if footer["tick_count"] != len(records):
        return ReplayReport(False, len(records), None,
                            f"footer tick_count {footer['tick_count']} != "
                            f"{len(records)} records")

    grip = []
    for rec in records:
        tick = rec["tick"]
        tau = rec["follower"]["tau_hat"][GRIPPER]
        grip.append(tau)
        expected = rti_mod.render_sample(tau, config.rti)
        logged = rec["rti"]
        if logged["fill"] != expected.fill_percent:
            return ReplayReport(False, tick, tick,
                                f"fill {logged['fill']!r} != recomputed {expected.fill_percent!r}")
        if tuple(logged["color"]) != tuple(expected.color):
            return ReplayReport(False, tick, tick,
                                f"color {logged['color']} != recomputed {list(expected.color)}")
        if logged["zone"] != expected.zone.value:
            return ReplayReport(False, tick, tick,
                                f"zone {logged['zone']!r} != recomputed {expected.zone.value!r}")

    # Recompute the band summary over the marker window.
    markers = [(int(t), str(label)) for t, label in footer.get("markers", [])]
    start = next((t for t, label in markers if label == MARKER_GRASP_START), None)
    end = next((t for t, label in markers if label == MARKER_RELEASE), None)
    recomputed = None
    if start is not None:
        if end is None or end <= start:
            end = len(records)
        window = grip[start:end]
        if window:
            timestamps = [records[i]["t_us"] for i in range(start, end)]
            recomputed = band_summary(trace_from_arrays(timestamps, window), config.rti)

    logged_summary = footer.get("band_summary")
    if (recomputed is None) != (logged_summary is None):
        return ReplayReport(False, len(records), None,
                            "band summary presence differs between log and replay")
    if recomputed is not None:
        if (logged_summary["low_count"] != recomputed.low_count
                or logged_summary["opt_count"] != recomputed.opt_count
                or logged_summary["high_count"] != recomputed.high_count
                or logged_summary["mae"] != recomputed.mae):
            return ReplayReport(False, len(records), None,
                                f"band summary mismatch: logged {logged_summary}, "
                                f"recomputed {recomputed.to_dict()}")
    return ReplayReport(True, len(records))


def log_summary_row(path: str) -> Optional[SummaryRow]:
    """Labels + band summary of a finished log, for report tables."""
    header, _records, footer = read_log(path)
    data = footer.get("band_summary")
    if data is None:
        return None
    cfg = header["config"]
    mode = OperatorMode(cfg["operator"])
    return SummaryRow(
        task=cfg["scenario"],
        obj=cfg["object"]["label"],
        method=method_label(mode),
        summary=BandSummary.from_dict(data),
    )


def sinusoid_tracking_error(config: SessionConfig, latency_ms: float = 0.0,
                            jitter_ms: float = 0.0, drop_probability: float = 0.0,
                            duration_s: float = 6.0, settle_s: float = 2.0,
                            amplitude: float = 0.04, frequency_hz: float = 3.0) -> float:
    """RMS leader-follower angle gap under the standard free-motion sinusoid.

    Uses the config's plant and controller but swaps in a torque-wave
    operator and symmetric channels with the given impairments. The first
    settle_s seconds are excluded.
    """
    import math as _math

    from .link import ChannelModel
    from .operators import SinusoidOperator

    def channel(stream: int) -> Channel:
        return Channel(ChannelModel(
            base_latency_ms=latency_ms, jitter_ms=jitter_ms,
            drop_probability=drop_probability,
            seed=derive_seed(config.seed, stream),
        ))

    pipeline = BilateralPipeline(
        operator=SinusoidOperator(amplitude=amplitude, frequency_hz=frequency_hz),
        leader_params=config.leader_arm,
        follower_params=config.follower_arm,
        grasped_object=no_object(),
        gains=config.gains,
        rtob_params=config.rtob,
        rti_config=config.rti,
        to_follower=channel(_STREAM_TO_FOLLOWER),
        to_leader=channel(_STREAM_TO_LEADER),
    )
    trace = run_tick_loop(pipeline, duration_s)
    start = round(settle_s / trace.dt)
    window = trace.tracking_error[start:]
    if not window:
        raise ValueError("duration too short for the settle window")
    return _math.sqrt(sum(x * x for x in window) / len(window))
