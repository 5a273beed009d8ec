"""Per-scenario loop: perceive, decide, execute, verify, record."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .decider import CorrectionBudget, FailureEvidence, LocatedDecision, decide_logical, locate, needs_localization, \
    self_correct
from .device.adb import AdbBackend
from .device.executor import execute
from .device.operations import ACTION_TYPES, Operation, OpKind
from .device.sim import SimAppSpec, SimBackend
from .errors import ConfigError, DeviceError, LlmError, StepError
from .llm.gateway import Gateway
from .llm.providers import provider_from_selector
from .llm.templates import load_templates
from .memory import OperationRecord, ScenarioSpec, init_session
from .perception.config import PerceptionConfig
from .perception.ocr import CommandOcr, FixtureOcr
from .perception.pipeline import perceive
from .recorder import (
    DEFAULT_CRASH_PATTERNS,
    PRE_WINDOW_S,
    BugReport,
    Recorder,
    SessionLog,
    TokenLedger,
    op_windows_from,
    scan_logs,
)
from .supervisor import WaitConfig, detect_actual_change, reverse_operation, undo, verify_completion, \
    verify_transition, wait_until_stable

log = logging.getLogger(__name__)

CASES = ("c1", "c2", "c3", "c4")
TERMINATIONS = ("normal", "aborted", "budget")


@dataclass
class EngineConfig:
    max_steps: int = 25
    max_corrections: int = 2
    max_wait_ms: int = 10_000
    poll_ms: int = 500
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    crash_patterns: tuple[str, ...] = DEFAULT_CRASH_PATTERNS
    provider: str = ""
    backend: str = ""
    action_types: tuple[str, ...] = ACTION_TYPES
    llm_timeout: float = 60.0
    max_tokens: int = 1024
    model: str = ""
    api_key_env: str = "OPENAI_API_KEY"
    ocr: str = "fixture"
    templates_dir: str | None = None

    def __post_init__(self):
        if isinstance(self.perception, dict):
            self.perception = PerceptionConfig.from_dict(self.perception)
        self.crash_patterns = tuple(self.crash_patterns)
        self.action_types = tuple(self.action_types)
        for name in ("max_steps", "max_corrections", "max_wait_ms", "poll_ms", "max_tokens"):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.llm_timeout <= 0:
            raise ConfigError("llm_timeout must be positive")
        unknown = set(self.action_types) - set(ACTION_TYPES)
        if unknown or "done" not in self.action_types:
            raise ConfigError(f"action types must be a subset of {ACTION_TYPES} that includes done")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["perception"] = self.perception.to_dict()
        d["crash_patterns"] = list(self.crash_patterns)
        d["action_types"] = list(self.action_types)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> EngineConfig:
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> EngineConfig:
        try:
            text = Path(path).read_text()
            data = yaml.safe_load(text) if str(path).endswith((".yaml", ".yml")) else json.loads(text)
        except (OSError, ValueError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data or {})


def classify_outcome(termination: str, covered: bool) -> str:
    if termination not in TERMINATIONS:
        raise ValueError(f"unknown termination {termination!r}")
    normal = termination == "normal"
    if covered:
        return "c1" if normal else "c2"
    return "c3" if normal else "c4"


@dataclass
class AccuracyCounts:
    N: int = 0
    n1: int = 0
    nf: int = 0

    def add(self, initially: bool, finally_: bool):
        self.N += 1
        self.n1 += int(initially and finally_)
        self.nf += int(finally_)

    def to_dict(self):
        return {"N": self.N, "n1": self.n1, "nf": self.nf}


@dataclass
class RunOutcome:
    case: str
    steps: int
    ops: list[OperationRecord]
    ledger: TokenLedger
    bugs: list[BugReport]
    termination: str
    scenario: str = ""
    session_id: str = ""
    covered: bool = False
    corrections: int = 0
    decisions: AccuracyCounts = field(default_factory=AccuracyCounts)
    localizations: AccuracyCounts = field(default_factory=AccuracyCounts)
    reason: str = ""
    session_dir: str | None = None

    def __post_init__(self):
        if self.case in ("c1", "c3") and self.termination != "normal":
            raise ValueError(f"{self.case} needs normal termination")
        if self.case in ("c2", "c4") and self.termination == "normal":
            raise ValueError(f"{self.case} needs abnormal termination")

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "steps": self.steps,
            "termination": self.termination,
            "scenario": self.scenario,
            "session_id": self.session_id,
            "covered": self.covered,
            "corrections": self.corrections,
            "decisions": self.decisions.to_dict(),
            "localizations": self.localizations.to_dict(),
            "reason": self.reason,
            "ledger": self.ledger.to_dict(),
            "bugs": [b.to_dict() for b in self.bugs],
            "ops": [r.to_dict() for r in self.ops],
        }

    @classmethod
    def from_dict(cls, d: dict) -> RunOutcome:
        return cls(
            case=d["case"],
            steps=d["steps"],
            ops=[OperationRecord.from_dict(r) for r in d.get("ops", [])],
            ledger=TokenLedger.from_dict(d["ledger"]),
            bugs=[BugReport.from_dict(b) for b in d.get("bugs", [])],
            termination=d["termination"],
            scenario=d.get("scenario", ""),
            session_id=d.get("session_id", ""),
            covered=d.get("covered", False),
            corrections=d.get("corrections", 0),
            decisions=AccuracyCounts(**d.get("decisions", {})),
            localizations=AccuracyCounts(**d.get("localizations", {})),
            reason=d.get("reason", ""),
        )


def make_backend(selector: str):
    kind, _, arg = selector.partition(":")
    if kind == "sim" and arg:
        return SimBackend(SimAppSpec.load(arg))
    if kind == "adb" and arg:
        app_id, _, serial = arg.partition("@")
        return AdbBackend(app_id, serial or None)
    raise ConfigError(f"bad backend selector {selector!r}")


def make_ocr(selector: str):
    if selector == "fixture":
        return FixtureOcr()
    kind, _, arg = selector.partition(":")
    if kind == "command" and arg:
        return CommandOcr(arg)
    raise ConfigError(f"bad ocr selector {selector!r}")


class _Session:
    """State of one run; split out of :func:`run_scenario` to keep the loop readable."""

    def __init__(self, cfg, scenario, provider, backend, ocr, out_dir):
        self.cfg = cfg
        self.backend = backend
        self.ocr = ocr
        self.clock = backend.clock
        info = backend.info()
        self.app_id = info.get("app_id", "")
        self.mem = init_session(scenario, info.get("device_info", ""), info.get("app_info", ""), self.app_id)
        self.dir = Path(out_dir) / self.mem.session_id if out_dir else None
        self.rec = Recorder(SessionLog(self.dir / "log.jsonl" if self.dir else None, self.clock))
        self.gw = Gateway(provider, load_templates(cfg.templates_dir), max_tokens=cfg.max_tokens,
                          listener=self.rec.on_llm_call)
        self.wait_cfg = WaitConfig(cfg.poll_ms, cfg.max_wait_ms)
        self.n_states = 0
        self.step = 0
        self.attempt = 0

    # helpers

    def verdict(self, v):
        self.rec.event("verdict", {"step": self.step, "attempt": self.attempt, **v.to_dict()})
        return v

    def capture(self):
        state = wait_until_stable(self.backend, self.gw, self.mem, self.wait_cfg, on_verdict=self.verdict)
        state.perception = perceive(state.image, self.ocr, self.cfg.perception)
        index = self.n_states
        self.n_states += 1
        state.meta["index"] = index
        self.mem.push_state(state)
        if self.dir is not None:
            shots = self.dir / "screenshots"
            shots.mkdir(parents=True, exist_ok=True)
            state.image.save(shots / f"{index:03d}.png")
            state.perception.annotated.save(shots / f"{index:03d}_annotated.png")
        self.rec.event("state", {
            "index": index,
            "image": state.image.digest(),
            "timed_out": state.timed_out,
            "polls": state.meta.get("polls", 0),
            "widgets": state.perception.widgets.to_list(),
        })
        return state

    def screen(self):
        return getattr(self.backend, "screen_id", None)

    def log_execute(self, op, er, role, screen_before, pre_actions=()):
        self.rec.event("execute", {
            "step": self.step,
            "attempt": self.attempt,
            "role": role,
            "op": op.to_dict(),
            "sub_actions": list(pre_actions) + er.sub_actions,
            "screen_before": screen_before,
            "screen_after": self.screen(),
        })

    def run_op(self, op: Operation, role: str):
        before = self.screen()
        er = execute(op, self.backend)
        self.log_execute(op, er, role, before)
        return er

    def record(self, op, er, *, role="step", reversed_=False, dec=None, loc=None, verdicts=()):
        rec = OperationRecord(
            index=len(self.mem.working.op_log),
            op=op,
            execution=er,
            step=self.step,
            attempt=self.attempt,
            role=role,
            reversed=reversed_,
            intent=dec.intent if dec else "",
            widget_description=dec.widget_description if dec else "",
            target=loc.to_dict() if loc else None,
            verdicts=[v.to_dict() for v in verdicts],
        )
        self.rec.record_step(self.mem, rec)
        return rec

    # the loop

    def run(self) -> RunOutcome:
        cfg = self.cfg
        start_ts = self.clock.now()
        self.rec.event("session_start", {
            "scenario": self.mem.working.scenario.to_dict(),
            "app_id": self.app_id,
            "device_info": self.mem.long_term.device_info,
            "config": {k: v for k, v in cfg.to_dict().items() if k not in ("provider", "backend")},
        })
        termination, reason = None, ""
        completed = done = False
        corrections = 0
        decisions, localizations = AccuracyCounts(), AccuracyCounts()
        try:
            self.capture()
            while termination is None:
                if self.step >= cfg.max_steps:
                    termination, reason = "budget", f"step budget of {cfg.max_steps} exhausted"
                    break
                self.step += 1
                self.attempt = 0
                outcome, causes, localized = self.run_step()
                corrections += len(causes)
                passed = outcome in ("passed", "completed", "done")
                decisions.add(not ({"missing_preaction", "wrong_logic"} & set(causes)), passed)
                if localized:
                    localizations.add("localization_error" not in causes, passed)
                if outcome == "completed":
                    termination, completed = "normal", True
                elif outcome == "done":
                    termination, done = "normal", True
                elif outcome == "exhausted":
                    termination, reason = "aborted", "correction budget exhausted"
        except (LlmError, StepError, DeviceError) as exc:
            termination, reason = "aborted", f"{type(exc).__name__}: {exc}"
            log.warning("session aborted: %s", reason)
        self.rec.flush()

        end_ts = self.clock.now()
        covered = self.covered(completed, done, termination)
        case = classify_outcome(termination, covered)
        bugs = self.mine_bugs(start_ts, end_ts)
        for b in bugs:
            self.rec.event("bug", b.to_dict())
        outcome = RunOutcome(
            case=case,
            steps=self.step,
            ops=list(self.mem.working.op_log),
            ledger=self.rec.ledger,
            bugs=bugs,
            termination=termination,
            scenario=self.mem.working.scenario.name,
            session_id=self.mem.session_id,
            covered=covered,
            corrections=corrections,
            decisions=decisions,
            localizations=localizations,
            reason=reason,
            session_dir=str(self.dir) if self.dir else None,
        )
        self.rec.event("session_end", {
            "case": case, "termination": termination, "covered": covered, "steps": self.step,
            "reason": reason, "ledger": self.rec.ledger.to_dict(),
        })
        if self.dir is not None:
            (self.dir / "outcome.json").write_text(json.dumps(outcome.to_dict(), indent=2, sort_keys=True))
            (self.dir / "bugs.json").write_text(json.dumps([b.to_dict() for b in bugs], indent=2))
        return outcome

    def run_step(self):
        """One decision and its correction rounds.

        Returns ``(outcome, causes, localized)`` with outcome one of passed,
        completed, done or exhausted.
        """
        cfg, mem, gw = self.cfg, self.mem, self.gw
        dec = decide_logical(mem, gw, cfg.action_types)
        self.rec.event("decision", {"step": self.step, "attempt": 0, "decision": dec.to_dict()})
        budget = CorrectionBudget(cfg.max_corrections)
        localized = False
        loc: LocatedDecision | None = None
        while True:
            if dec.action_type == "done":
                op = Operation(OpKind.DONE)
                er = self.run_op(op, "step")
                self.record(op, er, dec=dec)
                return "done", budget.causes, localized
            if loc is None:
                loc = locate(dec, mem.short_term.current_state.perception, gw, mem)
                self.rec.event("locate", {"step": self.step, "attempt": self.attempt, **loc.to_dict()})
            localized = localized or needs_localization(dec)
            op = loc.operation()
            prev = mem.short_term.current_state
            er = self.run_op(op, "step")
            curr = self.capture()
            t = self.verdict(verify_transition(mem, op, prev, curr, gw, dec.intent))
            if t.yes:
                c = self.verdict(verify_completion(mem, prev, curr, gw))
                self.record(op, er, dec=dec, loc=loc, verdicts=(t, c))
                return ("completed" if c.yes else "passed"), budget.causes, localized
            ch = self.verdict(detect_actual_change(mem, prev, curr, gw, op))
            rev = reverse_operation(op) if ch.yes else None
            self.record(op, er, reversed_=rev is not None, dec=dec, loc=loc, verdicts=(t, ch))
            if ch.yes and rev is None:
                self.rec.event("warning", {"step": self.step, "message": f"{op.kind.value} cannot be reversed"})
            if rev is not None:
                before = self.screen()
                rev, parts = undo(op, self.backend, execute)
                # A clear_text issued ahead of the back press is logged as part of the reversal.
                self.log_execute(rev, parts[-1], "reverse", before, pre_actions=parts[:-1])
                self.record(rev, parts[-1], role="reverse")
                self.capture()
            if budget.exhausted:
                return "exhausted", budget.causes, localized
            failure = FailureEvidence(dec, op.describe(), t.reason, ch.yes, rev is not None, loc)
            cause, new = self_correct(mem, failure, gw, mem.short_term.current_state.perception, cfg.action_types)
            budget.spend(cause)
            self.attempt += 1
            payload = {"step": self.step, "attempt": self.attempt, "cause": cause.cause, "evidence": cause.evidence}
            if isinstance(new, LocatedDecision):
                loc = new
                payload["located"] = new.to_dict()
            else:
                dec, loc = new, None
                payload["decision"] = new.to_dict()
            self.rec.event("correction", payload)

    def covered(self, completed: bool, done: bool, termination: str) -> bool:
        if completed:
            return True
        goal = getattr(self.backend, "goal_reached", None)
        verdict = goal(self.mem.working.scenario.name) if callable(goal) else None
        if verdict is not None:
            return bool(verdict)
        return done and termination == "normal"

    def mine_bugs(self, start_ts, end_ts):
        try:
            lines = self.backend.read_log_since(start_ts - PRE_WINDOW_S)
        except DeviceError as exc:
            log.warning("could not read device logs: %s", exc)
            return []
        windows = op_windows_from(self.mem.working.op_log, end_ts)
        return scan_logs(lines, windows, self.app_id, self.cfg.crash_patterns)


def run_scenario(cfg: EngineConfig, scenario: ScenarioSpec, *, provider=None, backend=None, ocr=None,
                 out_dir=None) -> RunOutcome:
    if provider is None:
        provider = provider_from_selector(cfg.provider, model=cfg.model, timeout=cfg.llm_timeout,
                                          api_key_env=cfg.api_key_env)
    if backend is None:
        backend = make_backend(cfg.backend)
    if ocr is None:
        ocr = make_ocr(cfg.ocr)
    return _Session(cfg, scenario, provider, backend, ocr, out_dir).run()
