"""The Recorder: session log, six-stage token ledger and crash-log mining."""

from __future__ import annotations

import hashlib
import json
import logging
import re
from calendar import timegm
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RecorderError
from .llm.messages import STAGES, Stage, Usage
from .memory import OperationRecord

log = logging.getLogger(__name__)

DEFAULT_CRASH_PATTERNS = ("FATAL EXCEPTION", "ANR in", "has died")
PRE_WINDOW_S = 1.0

# "2026-10-14 00:00:01.300  4242  4242 E AndroidRuntime: message"
_LOG_LINE = re.compile(
    r"^(?P<ts>\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}(?:\.\d{1,6})?)\s+"
    r"(?P<pid>\d+)\s+(?P<tid>\d+)\s+(?P<level>[VDIWEFA])\s+(?P<tag>[^:]*?)\s*:\s?(?P<msg>.*)$"
)
_TS = re.compile(r"^(\d{4})-(\d{2})-(\d{2}) (\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,6}))?")
_EXC = re.compile(r"\b((?:[A-Za-z_$][\w$]*\.)+[A-Za-z_$][\w$]*(?:Exception|Error))\b")
_FRAME = re.compile(r"^\s*at\s+(\S+)")


class TokenLedger:
    """Per-stage token totals; the total is always the sum of the six stages."""

    def __init__(self, totals=None):
        self.totals = {s: 0 for s in STAGES}
        for k, v in (totals or {}).items():
            self.totals[Stage(k)] = int(v)

    def charge(self, stage, usage) -> TokenLedger:
        amount = usage.total if isinstance(usage, Usage) else int(usage)
        if amount < 0:
            raise ValueError("cannot charge a negative amount")
        self.totals[Stage(stage)] += amount
        return self

    @property
    def total(self) -> int:
        return sum(self.totals.values())

    def __getitem__(self, stage) -> int:
        return self.totals[Stage(stage)]

    def __eq__(self, other):
        return isinstance(other, TokenLedger) and self.totals == other.totals

    def __repr__(self):
        return f"TokenLedger({self.to_dict()})"

    def to_dict(self) -> dict:
        d = {s.value: self.totals[s] for s in STAGES}
        d["total"] = self.total
        return d

    @classmethod
    def from_dict(cls, d) -> TokenLedger:
        return cls({k: v for k, v in d.items() if k != "total"})


def charge(ledger: TokenLedger, stage, usage) -> TokenLedger:
    return ledger.charge(stage, usage)


class SessionLog:
    """Append-only line-delimited record file: ``{"ts", "kind", "payload"}`` per line."""

    def __init__(self, path=None, clock=None):
        self.path = Path(path) if path else None
        self.clock = clock
        self.records: list[dict] = []
        if self.path is not None:
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self.path.write_text("")
            except OSError as exc:
                raise RecorderError(f"cannot create session log {self.path}: {exc}") from exc

    def write(self, kind: str, payload: dict) -> dict:
        rec = {"ts": self.clock.now() if self.clock else 0.0, "kind": kind, "payload": payload}
        line = json.dumps(rec, sort_keys=True, ensure_ascii=False)
        if self.path is not None:
            try:
                with self.path.open("a") as fh:
                    fh.write(line + "\n")
            except OSError as exc:
                raise RecorderError(f"cannot append to session log {self.path}: {exc}") from exc
        self.records.append(rec)
        return rec


def read_session_log(path) -> list[dict]:
    out = []
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if line.strip():
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise RecorderError(f"{path}:{n}: unreadable record") from exc
    return out


class Recorder:
    """Single writer for one session.

    Gateway calls are logged as they happen and their usage is held until
    the step that caused them is recorded; :meth:`flush` charges whatever is
    left (the initial loading wait, an aborted step).
    """

    def __init__(self, session_log: SessionLog, ledger: TokenLedger | None = None):
        self.log = session_log
        self.ledger = ledger or TokenLedger()
        self.pending: list[tuple[Stage, Usage]] = []

    def on_llm_call(self, call) -> None:
        req, resp = call.request, call.response
        self.log.write("llm", {
            "stage": req.stage.value,
            "prompt": req.prompt,
            "attempt": call.attempt,
            "text": req.text,
            "images": [img.digest() for img in req.images],
            "response": resp.text,
            "usage": resp.usage.to_dict(),
            "error": call.error,
        })
        self.pending.append((req.stage, resp.usage))

    def event(self, kind: str, payload: dict) -> None:
        self.log.write(kind, payload)

    def record_step(self, mem, record: OperationRecord):
        mem.append_op(record)
        self.log.write("op_record", record.to_dict())
        self.flush()
        return mem

    def flush(self) -> None:
        for stage, usage in self.pending:
            self.ledger.charge(stage, usage)
        self.pending.clear()


def replay(records) -> tuple[list[OperationRecord], TokenLedger]:
    """Rebuild the op log and the ledger from session-log records."""
    ops = []
    ledger = TokenLedger()
    for rec in records:
        if rec["kind"] == "op_record":
            ops.append(OperationRecord.from_dict(rec["payload"]))
        elif rec["kind"] == "llm":
            ledger.charge(rec["payload"]["stage"], Usage.from_dict(rec["payload"]["usage"]))
    return ops, ledger


# Crash-log mining


@dataclass(frozen=True)
class BugReport:
    app_id: str
    first_log_line: str
    pattern: str
    op_index: int
    dedup_key: str
    ts: float
    exception: str = ""
    top_frame: str = ""
    occurrences: int = 1

    def to_dict(self) -> dict:
        return {
            "app_id": self.app_id,
            "first_log_line": self.first_log_line,
            "pattern": self.pattern,
            "op_index": self.op_index,
            "dedup_key": self.dedup_key,
            "ts": self.ts,
            "exception": self.exception,
            "top_frame": self.top_frame,
            "occurrences": self.occurrences,
        }

    @classmethod
    def from_dict(cls, d) -> BugReport:
        return cls(**d)


def parse_log_ts(line: str) -> float | None:
    """Seconds since the epoch (UTC) from a year-qualified log line, or None."""
    m = _TS.match(line)
    if m is None:
        return None
    y, mo, d, h, mi, s = (int(g) for g in m.groups()[:6])
    frac = m.group(7) or "0"
    try:
        base = timegm((y, mo, d, h, mi, s, 0, 0, 0))
    except (ValueError, OverflowError):
        return None
    if not (1 <= mo <= 12 and 1 <= d <= 31 and h < 24 and mi < 60 and s < 61):
        return None
    return base + int(frac) / 10 ** len(frac)


def dedup_key(app_id: str, exception: str, top_frame: str) -> str:
    return hashlib.sha256(f"{app_id}\n{exception}\n{top_frame}".encode()).hexdigest()[:16]


def assign_op(ts: float, op_windows) -> int | None:
    """Index of the op whose window holds ``ts``.

    Windows are ``(start, end)`` pairs ordered by start. The op that started
    most recently at or before ``ts`` wins; only a line logged before every
    start can fall back to the first op's one-second pre-window.
    """
    best = None
    for i, (start, end) in enumerate(op_windows):
        if start <= ts <= end:
            best = i
    if best is not None:
        return best
    for i, (start, end) in enumerate(op_windows):
        if start - PRE_WINDOW_S <= ts < start:
            return i
    return None


def _header(line):
    m = _LOG_LINE.match(line)
    return (m.group("pid"), m.group("tid"), m.group("level"), m.group("tag")) if m else None


def _message(line):
    m = _LOG_LINE.match(line)
    return m.group("msg") if m else line


@dataclass
class ScanStats:
    skipped_timestamps: int = 0
    matched_lines: int = 0
    foreign: int = 0
    outside_windows: int = 0
    keys: dict = field(default_factory=dict)


def scan_logs(lines, op_windows, app_id: str, patterns=DEFAULT_CRASH_PATTERNS, stats: ScanStats | None = None):
    """Crash reports for ``app_id`` whose timestamps fall in an op window.

    A matched line is read together with the lines that follow it under the
    same log header (pid, tid, level, tag); that block supplies the app id,
    the exception class and the top stack frame.
    """
    stats = stats if stats is not None else ScanStats()
    lines = list(lines)
    windows = [(float(a), float(b)) for a, b in op_windows]
    reports: dict[str, BugReport] = {}
    order = []
    for i, line in enumerate(lines):
        pattern = next((p for p in patterns if p in line), None)
        if pattern is None:
            continue
        ts = parse_log_ts(line)
        if ts is None:
            stats.skipped_timestamps += 1
            continue
        stats.matched_lines += 1
        head = _header(line)
        block = [line]
        for nxt in lines[i + 1:]:
            if head is None or _header(nxt) != head or any(p in nxt for p in patterns):
                break
            block.append(nxt)
        if not any(app_id and app_id in b for b in block):
            stats.foreign += 1
            continue
        op_index = assign_op(ts, windows)
        if op_index is None:
            stats.outside_windows += 1
            continue
        exc = frame = ""
        for b in block:
            msg = _message(b)
            if not exc:
                m = _EXC.search(msg)
                exc = m.group(1) if m else ""
            if not frame:
                m = _FRAME.match(msg)
                frame = m.group(1) if m else ""
        key = dedup_key(app_id, exc or pattern, frame)
        if key in reports:
            r = reports[key]
            reports[key] = BugReport(**{**r.to_dict(), "occurrences": r.occurrences + 1})
            continue
        reports[key] = BugReport(app_id, line, pattern, op_index, key, ts, exc, frame)
        order.append(key)
    if stats.skipped_timestamps:
        log.warning("skipped %d crash lines with unreadable timestamps", stats.skipped_timestamps)
    stats.keys = {k: reports[k].occurrences for k in order}
    return [reports[k] for k in order]


def op_windows_from(op_log, session_end: float) -> list[tuple[float, float]]:
    starts = [r.execution.started for r in op_log]
    return [(s, starts[i + 1] if i + 1 < len(starts) else session_end) for i, s in enumerate(starts)]
