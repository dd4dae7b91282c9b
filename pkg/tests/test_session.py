import gzip
import json

import pytest

from ubtelesim.config import (OperatorMode, Scenario, SessionConfig,
                              object_by_label)
from ubtelesim.errors import SchemaError
from ubtelesim.metrics import compare_summaries
from ubtelesim.plant import ObjectLabel
from ubtelesim.session import (log_summary_row, read_log, replay,
                               run_session, simulate, summary_row,
                               trial_window, window_summary)

CFG = SessionConfig().replace(duration_s=4.0, seed=21)


def _run(tmp_path, name="session.jsonl", config=CFG):
    path = tmp_path / name
    return run_session(config, out_path=str(path))


# ----------------------------------------------------------------- running

def test_record_count_and_exit(tmp_path):
    result = _run(tmp_path)
    assert result.trace.tick_count == 4000
    assert result.fault is None
    header, records, footer = read_log(result.path)
    assert header["schema_version"] == 1
    assert len(records) == 4000
    assert footer["tick_count"] == 4000


def test_byte_identical_logs_for_same_config(tmp_path):
    a = _run(tmp_path, "a.jsonl")
    b = _run(tmp_path, "b.jsonl")
    assert open(a.path, "rb").read() == open(b.path, "rb").read()


def test_different_seeds_differ(tmp_path):
    a = _run(tmp_path, "a.jsonl")
    b = _run(tmp_path, "b.jsonl", CFG.replace(seed=22))
    assert open(a.path, "rb").read() != open(b.path, "rb").read()


def test_gzip_log_roundtrip(tmp_path):
    result = _run(tmp_path, "session.jsonl.gz")
    with gzip.open(result.path, "rt") as fh:
        first = json.loads(fh.readline())
    assert first["type"] == "header"
    assert replay(result.path).ok


def test_summary_matches_live_metrics(tmp_path):
    result = _run(tmp_path)
    live = window_summary(result.trace, CFG)
    _header, _records, footer = read_log(result.path)
    logged = footer["band_summary"]
    assert logged["low_count"] == live.low_count
    assert logged["opt_count"] == live.opt_count
    assert logged["high_count"] == live.high_count
    assert logged["mae"] == live.mae


def test_markers_present_in_log(tmp_path):
    result = _run(tmp_path)
    _header, records, footer = read_log(result.path)
    labels = [label for _t, label in footer["markers"]]
    assert labels == ["grasp-start", "lift-start", "release"]
    inline = [m for r in records for m in r.get("markers", [])]
    assert inline == labels


# ----------------------------------------------------------------- replay

def test_replay_fresh_log_passes(tmp_path):
    result = _run(tmp_path)
    report = replay(result.path)
    assert report.ok
    assert report.ticks_checked == 4000


def test_replay_detects_tampered_color(tmp_path):
    result = _run(tmp_path)
    lines = open(result.path).read().splitlines()
    victim = json.loads(lines[2000])
    victim["rti"]["color"][0] = (victim["rti"]["color"][0] + 1) % 256
    lines[2000] = json.dumps(victim, separators=(",", ":"))
    tampered = tmp_path / "tampered.jsonl"
    tampered.write_text("\n".join(lines) + "\n")
    report = replay(str(tampered))
    assert not report.ok
    assert report.divergence_tick == victim["tick"]
    assert "color" in report.message


def test_replay_detects_tampered_summary(tmp_path):
    result = _run(tmp_path)
    lines = open(result.path).read().splitlines()
    footer = json.loads(lines[-1])
    footer["band_summary"]["opt_count"] += 1
    lines[-1] = json.dumps(footer, separators=(",", ":"))
    tampered = tmp_path / "tampered.jsonl"
    tampered.write_text("\n".join(lines) + "\n")
    report = replay(str(tampered))
    assert not report.ok
    assert "summary" in report.message


def test_truncated_log_rejected(tmp_path):
    result = _run(tmp_path)
    lines = open(result.path).read().splitlines()
    truncated = tmp_path / "truncated.jsonl"
    truncated.write_text("\n".join(lines[:100]) + "\n")
    with pytest.raises(SchemaError):
        replay(str(truncated))


def test_unsupported_schema_version(tmp_path):
    result = _run(tmp_path)
    lines = open(result.path).read().splitlines()
    header = json.loads(lines[0])
    header["schema_version"] = 99
    lines[0] = json.dumps(header, separators=(",", ":"))
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError):
        replay(str(bad))


def test_empty_log_rejected(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(SchemaError):
        read_log(str(empty))


# ------------------------------------------------------------- aggregates

def test_summary_row_labels(tmp_path):
    config = CFG.replace(scenario=Scenario.PICKPLACE,
                         object=object_by_label(ObjectLabel.SPONGE),
                         operator=OperatorMode.SCRIPTED_BASELINE)
    result = run_session(config, out_path=str(tmp_path / "s.jsonl"))
    row = summary_row(result.trace, config)
    assert (row.task, row.obj, row.method) == ("pickplace", "sponge", "baseline")
    from_log = log_summary_row(str(tmp_path / "s.jsonl"))
    assert from_log.summary.to_dict() == row.summary.to_dict()


def test_rti_aware_dominates_baseline_single_pair():
    base_cfg = CFG.replace(operator=OperatorMode.SCRIPTED_BASELINE, duration_s=8.0)
    rti_cfg = CFG.replace(operator=OperatorMode.SCRIPTED_RTI_AWARE, duration_s=8.0)
    s_base = window_summary(simulate(base_cfg), base_cfg)
    s_rti = window_summary(simulate(rti_cfg), rti_cfg)
    assert compare_summaries(s_base, s_rti).dominates


def test_trial_window_requires_grasp():
    config = CFG.replace(object=object_by_label(ObjectLabel.NONE))
    trace = simulate(config)
    assert trial_window(trace) is None
    assert window_summary(trace, config) is None


def test_canonical_twenty_second_session(tmp_path):
    # Lift / Block / indicator-aware, seed 7, 20 s: exactly 20000 records.
    config = SessionConfig().replace(duration_s=20.0, seed=7)
    result = run_session(config, out_path=str(tmp_path / "long.jsonl"))
    assert result.fault is None
    assert result.trace.tick_count == 20000
    _header, records, footer = read_log(result.path)
    assert len(records) == 20000
    assert footer["tick_count"] == 20000


def test_fault_recorded_in_log_footer(tmp_path):
    from ubtelesim.loop import OperatorAction

    class Bomb:
        def __call__(self, view):
            if view.tick == 123:
                return OperatorAction((float("nan"), 0.0, 0.0, 0.0))
            return OperatorAction((0.0, 0.0, 0.0, 0.0))

    path = tmp_path / "fault.jsonl"
    result = run_session(CFG, out_path=str(path), operator=Bomb())
    assert result.fault is not None
    assert result.trace.fault_tick == 123
    _header, records, footer = read_log(str(path))
    assert len(records) == 123  # halted at the faulty tick
    assert footer["fault"]["tick"] == 123
    assert "non-finite" in footer["fault"]["reason"]
