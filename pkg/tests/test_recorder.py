import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from guiscenario.device.base import VirtualClock
from guiscenario.device.operations import ExecutionRecord, Operation
from guiscenario.device.sim import format_log_ts
from guiscenario.errors import RecorderError
from guiscenario.llm.gateway import CallRecord
from guiscenario.llm.messages import STAGES, LlmRequest, LlmResponse, Stage, Usage
from guiscenario.memory import OperationRecord, ScenarioSpec, init_session
from guiscenario.raster import RasterImage
from guiscenario.recorder import (
    PRE_WINDOW_S,
    Recorder,
    ScanStats,
    SessionLog,
    TokenLedger,
    assign_op,
    dedup_key,
    op_windows_from,
    parse_log_ts,
    read_session_log,
    replay,
    scan_logs,
)

T0 = 1_791_936_000.0


# ledger

def test_ledger_charges_usage_and_ints():
    led = TokenLedger()
    led.charge("loading_check", Usage(10, 2)).charge(Stage.LOADING_CHECK, 5)
    assert led["loading_check"] == 17 and led.total == 17
    with pytest.raises(ValueError):
        led.charge("loading_check", -1)
    with pytest.raises(ValueError):
        led.charge("not_a_stage", 1)


def test_ledger_dict_round_trip_ignores_stored_total():
    led = TokenLedger.from_dict({"logical_decision": 3, "self_correction": 4, "total": 999})
    assert led.total == 7
    assert list(led.to_dict()) == [s.value for s in STAGES] + ["total"]


@given(st.lists(st.tuples(st.sampled_from(STAGES), st.integers(0, 10_000), st.integers(0, 10_000))))
def test_ledger_conservation(charges):
    led = TokenLedger()
    for stage, p, c in charges:
        led.charge(stage, Usage(p, c))
    assert led.total == sum(p + c for _, p, c in charges)
    assert led.total == sum(led[s] for s in STAGES)


# session log and replay

def _op_record(i, started):
    op = Operation("click", tap_point=(10, 10 + i))
    return OperationRecord(i, op, ExecutionRecord(op, [{"action": "tap"}], started, started + 0.1), step=i + 1)


def _call(stage, usage, attempt=0, error=None):
    req = LlmRequest(stage, "prompt text", (RasterImage.blank(4, 4),), prompt=stage.value)
    return CallRecord(req, LlmResponse("VERDICT: no", usage), attempt, error)


def test_session_log_lines_and_replay(tmp_path):
    clock = VirtualClock(T0)
    log = SessionLog(tmp_path / "s" / "log.jsonl", clock)
    rec = Recorder(log)
    mem = init_session(ScenarioSpec("x", "do it"), "dev", "app")
    rec.on_llm_call(_call(Stage.LOADING_CHECK, Usage(5, 1)))
    rec.on_llm_call(_call(Stage.LOGICAL_DECISION, Usage(50, 10), error="bad"))
    assert rec.ledger.total == 0  # held until the step is recorded
    rec.record_step(mem, _op_record(0, T0))
    assert rec.ledger.total == 66
    rec.on_llm_call(_call(Stage.SELF_CORRECTION, Usage(7, 0)))
    rec.flush()

    lines = (tmp_path / "s" / "log.jsonl").read_text().splitlines()
    assert all(json.loads(line).keys() == {"ts", "kind", "payload"} for line in lines)
    records = read_session_log(tmp_path / "s" / "log.jsonl")
    assert [r["kind"] for r in records] == ["llm", "llm", "op_record", "llm"]
    assert records[1]["payload"]["error"] == "bad"
    assert len(records[0]["payload"]["images"][0]) == 64
    ops, ledger = replay(records)
    assert ledger == rec.ledger and ledger.total == 73
    assert [o.to_dict() for o in ops] == [o.to_dict() for o in mem.working.op_log]


def test_session_log_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(RecorderError):
        SessionLog(blocker / "log.jsonl")


def test_read_session_log_reports_bad_line(tmp_path):
    p = tmp_path / "log.jsonl"
    p.write_text('{"ts": 0, "kind": "x", "payload": {}}\nnot json\n')
    with pytest.raises(RecorderError, match=":2:"):
        read_session_log(p)


# crash mining

def test_parse_log_ts():
    assert parse_log_ts("2026-10-14 00:00:01.300  1 1 E X: y") == pytest.approx(T0 + 1.3)
    assert parse_log_ts("2026-10-14 00:00:01 rest") == T0 + 1
    assert parse_log_ts("10-14 00:00:01.300 no year") is None
    assert parse_log_ts("2026-13-14 00:00:01.300 bad month") is None


def test_assign_op_prefers_latest_start_and_pre_window():
    windows = [(10.0, 12.0), (12.0, 15.0)]
    assert assign_op(11.0, windows) == 0
    assert assign_op(12.0, windows) == 1  # a shared boundary goes to the later op
    assert assign_op(9.5, windows) == 0
    assert assign_op(10.0 - PRE_WINDOW_S - 0.01, windows) is None
    assert assign_op(15.5, windows) is None


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=8, unique=True),
       st.floats(-5, 110, allow_nan=False))
def test_assign_op_picks_at_most_one_covering_window(starts, ts):
    starts = sorted(starts)
    windows = [(s, starts[i + 1] if i + 1 < len(starts) else 100.0) for i, s in enumerate(starts)]
    idx = assign_op(ts, windows)
    covering = [i for i, (a, b) in enumerate(windows) if a <= ts <= b]
    if covering:
        assert idx == max(covering)
    elif windows[0][0] - PRE_WINDOW_S <= ts < windows[0][0]:
        assert idx == 0
    else:
        assert idx is None


def _lines(ts, pid, parts, tag="AndroidRuntime"):
    stamp = format_log_ts(ts)
    return [f"{stamp} {pid:5d} {pid:5d} E {tag}: {p}" for p in parts]


CRASH = ["FATAL EXCEPTION: main", "Process: demo.app, PID: 42",
         "java.lang.IllegalStateException: boom", "\tat demo.app.Main.run(Main.java:1)"]


def test_scan_logs_reads_block_and_dedups():
    windows = [(T0, T0 + 5), (T0 + 5, T0 + 10)]
    lines = (_lines(T0 + 6, 42, CRASH) + ["2026-10-14 00:00:07.000    42    42 I Other: noise"]
             + _lines(T0 + 8, 42, CRASH))
    stats = ScanStats()
    bugs = scan_logs(lines, windows, "demo.app", stats=stats)
    assert len(bugs) == 1
    b = bugs[0]
    assert (b.op_index, b.occurrences, b.pattern) == (1, 2, "FATAL EXCEPTION")
    assert b.exception == "java.lang.IllegalStateException"
    assert b.top_frame == "demo.app.Main.run(Main.java:1)"
    assert b.dedup_key == dedup_key("demo.app", b.exception, b.top_frame)
    assert b.first_log_line == lines[0]
    assert stats.matched_lines == 2


def test_scan_logs_skips_foreign_outside_and_unparsable():
    windows = [(T0, T0 + 5)]
    foreign = _lines(T0 + 1, 77, ["FATAL EXCEPTION: main", "Process: com.other, PID: 77"])
    late = _lines(T0 + 60, 42, CRASH)
    undated = ["FATAL EXCEPTION: main (no timestamp)"]
    stats = ScanStats()
    assert scan_logs(foreign + late + undated, windows, "demo.app", stats=stats) == []
    assert (stats.foreign, stats.outside_windows, stats.skipped_timestamps) == (1, 1, 1)


def test_scan_logs_distinct_frames_are_distinct_bugs():
    other = CRASH[:3] + ["\tat demo.app.Other.go(Other.java:9)"]
    bugs = scan_logs(_lines(T0 + 1, 42, CRASH) + _lines(T0 + 2, 42, other), [(T0, T0 + 5)], "demo.app")
    assert len(bugs) == 2 and bugs[0].dedup_key != bugs[1].dedup_key


def test_op_windows_from():
    ops = [_op_record(0, 1.0), _op_record(1, 3.0)]
    assert op_windows_from(ops, 9.0) == [(1.0, 3.0), (3.0, 9.0)]
