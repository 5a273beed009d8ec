"""The Supervisor: waits for a stable page, then judges the operation's effect."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .decider import context_slots
from .device.base import supports_clear
from .device.operations import OPPOSITE, Operation, OpKind
from .llm.parsing import parse_verdict
from .memory import GuiState

log = logging.getLogger(__name__)

VERIFY_STAGES = ("loading", "transition", "change", "completion")


@dataclass(frozen=True)
class VerificationResult:
    stage: str
    verdict: str
    reason: str = ""
    called_model: bool = True

    def __post_init__(self):
        if self.stage not in VERIFY_STAGES:
            raise ValueError(f"unknown verification stage {self.stage!r}")
        if self.verdict not in ("yes", "no"):
            raise ValueError("verdict must be yes or no")

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"

    def to_dict(self) -> dict:
        return {"check": self.stage, "verdict": self.verdict, "reason": self.reason,
                "called_model": self.called_model}


@dataclass(frozen=True)
class WaitConfig:
    poll_ms: int = 500
    max_wait_ms: int = 10_000

    def __post_init__(self):
        if self.poll_ms <= 0 or self.max_wait_ms <= 0:
            raise ValueError("wait budgets must be positive")


def wait_until_stable(backend, gw, mem, cfg: WaitConfig = WaitConfig(), on_verdict=None) -> GuiState:
    """Poll screenshots until the model says the page is no longer loading.

    Returns the first stable state, or the last one flagged ``timed_out``
    once ``max_wait_ms`` of polling has passed.
    """
    slots = context_slots(mem)
    waited = 0
    while True:
        image = backend.screenshot()
        ts = backend.clock.now()
        verdict, _ = gw.ask("loading_check", parse_verdict, images=(image,), **slots)
        result = VerificationResult("loading", verdict.verdict, verdict.reason)
        if on_verdict is not None:
            on_verdict(result)
        if not verdict.yes:
            return GuiState(image, ts, meta={"polls": waited // cfg.poll_ms})
        if waited + cfg.poll_ms > cfg.max_wait_ms:
            return GuiState(image, ts, timed_out=True, meta={"polls": waited // cfg.poll_ms})
        backend.clock.sleep(cfg.poll_ms / 1000.0)
        waited += cfg.poll_ms


def verify_transition(mem, op: Operation, prev: GuiState, curr: GuiState, gw, intent: str = "") -> VerificationResult:
    extra = op.describe() + (f" (intent: {intent})" if intent else "")
    if prev.image == curr.image:
        # Only a hint for the model; it keeps the final say.
        extra += "\nNote: the two screenshots are pixel-identical."
    verdict, _ = gw.ask("transition_check", parse_verdict, images=(prev.image, curr.image),
                        extra=extra, **context_slots(mem))
    return VerificationResult("transition", verdict.verdict, verdict.reason)


def detect_actual_change(mem, prev: GuiState, curr: GuiState, gw, op: Operation | None = None) -> VerificationResult:
    if prev.image == curr.image:
        return VerificationResult("change", "no", "screenshots are byte-identical", called_model=False)
    extra = f"The latest operation was: {op.describe()}." if op is not None else ""
    verdict, _ = gw.ask("change_check", parse_verdict, images=(prev.image, curr.image),
                        extra=extra, **context_slots(mem))
    return VerificationResult("change", verdict.verdict, verdict.reason)


def reverse_operation(op: Operation) -> Operation | None:
    if op.kind in (OpKind.CLICK, OpKind.INPUT):
        return Operation(OpKind.BACK)
    if op.kind is OpKind.SCROLL:
        return Operation(OpKind.SCROLL, direction=OPPOSITE[op.direction], region=op.region)
    log.warning("%s cannot be reversed", op.kind.value)
    return None


def undo(op: Operation, backend, execute) -> tuple[Operation | None, list]:
    """Issue the reverse of ``op``. Returns the reverse op and the backend records."""
    rev = reverse_operation(op)
    if rev is None:
        return None, []
    records = []
    if op.kind is OpKind.INPUT and supports_clear(backend):
        backend.clear_text()
        records.append({"action": "clear_text"})
    records.append(execute(rev, backend))
    return rev, records


def verify_completion(mem, prev: GuiState, curr: GuiState, gw) -> VerificationResult:
    verdict, _ = gw.ask("completion_check", parse_verdict, images=(prev.image, curr.image),
                        **context_slots(mem))
    return VerificationResult("completion", verdict.verdict, verdict.reason)
