"""Three-tier context memory shared by the agents of one session.

Long-term memory holds the device, app and scenario catalog and never changes
during a session. Working memory holds the target scenario, the executed
operations and digests of the model dialogue. Short-term memory holds the
current GUI state and the one captured right before the latest operation.
"""

from __future__ import annotations

import hashlib
import uuid
from dataclasses import dataclass, field

from .device.operations import ExecutionRecord, Operation
from .errors import ScenarioError
from .perception.widgets import PerceptionResult, WidgetSet
from .raster import RasterImage

DIGEST_HEAD = 200


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    required_inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.description or not self.description.strip():
            raise ScenarioError(f"scenario {self.name!r} has an empty description")
        object.__setattr__(self, "required_inputs", dict(self.required_inputs or {}))

    def to_dict(self):
        return {"name": self.name, "description": self.description, "required_inputs": dict(self.required_inputs)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], d.get("description", ""), d.get("required_inputs") or {})

    def prompt_text(self) -> str:
        text = f"{self.name}: {self.description}"
        if self.required_inputs:
            pairs = ", ".join(f"{k} = {v}" for k, v in sorted(self.required_inputs.items()))
            text += f"\nUse these inputs where needed: {pairs}"
        return text


@dataclass(frozen=True)
class LongTermMemory:
    device_info: str
    app_info: str
    app_id: str = ""
    scenario_catalog: tuple[ScenarioSpec, ...] = ()

    def preamble(self) -> str:
        return f"Device: {self.device_info}\nApp under test: {self.app_info}"

    def to_dict(self):
        return {
            "device_info": self.device_info,
            "app_info": self.app_info,
            "app_id": self.app_id,
            "scenario_catalog": [s.to_dict() for s in self.scenario_catalog],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["device_info"], d["app_info"], d.get("app_id", ""),
                   tuple(ScenarioSpec.from_dict(s) for s in d.get("scenario_catalog", [])))


def digest(text: str) -> dict:
    return {"sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(), "head": text[:DIGEST_HEAD]}


@dataclass(frozen=True)
class DialogueEntry:
    prompt: dict
    response: dict
    stage: str

    def to_dict(self):
        return {"prompt": self.prompt, "response": self.response, "stage": self.stage}

    @classmethod
    def from_dict(cls, d):
        return cls(d["prompt"], d["response"], d["stage"])


@dataclass
class GuiState:
    image: RasterImage
    ts: float = 0.0
    perception: PerceptionResult | None = None
    timed_out: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.image is None:
            raise ValueError("a GUI state needs a screenshot")

    def to_dict(self):
        d = {"image": self.image.to_b64(), "ts": self.ts, "timed_out": self.timed_out, "meta": dict(self.meta)}
        if self.perception is not None:
            d["perception"] = {
                "widgets": self.perception.widgets.to_list(),
                "annotated": self.perception.annotated.to_b64(),
            }
        return d

    @classmethod
    def from_dict(cls, d):
        image = RasterImage.from_b64(d["image"])
        perception = None
        if d.get("perception"):
            perception = PerceptionResult(
                WidgetSet.from_list(d["perception"]["widgets"]),
                RasterImage.from_b64(d["perception"]["annotated"]),
                image,
            )
        return cls(image, d.get("ts", 0.0), perception, d.get("timed_out", False), dict(d.get("meta") or {}))

    def __eq__(self, other):
        if not isinstance(other, GuiState):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@dataclass
class OperationRecord:
    index: int
    op: Operation
    execution: ExecutionRecord
    step: int = 0
    attempt: int = 0
    role: str = "step"
    reversed: bool = False
    intent: str = ""
    widget_description: str = ""
    target: dict | None = None
    verdicts: list = field(default_factory=list)

    def summary(self) -> str:
        what = self.op.describe()
        if self.intent:
            what = f"{what} ({self.intent})"
        if self.role == "reverse":
            return f"{what} [reversal of the previous operation]"
        status = "undone" if self.reversed else ("passed" if self._passed() else "failed")
        return f"{what} [{status}]"

    def _passed(self) -> bool:
        return any(v.get("check") == "transition" and v.get("verdict") == "yes" for v in self.verdicts) or \
            self.op.kind.value == "done"

    def to_dict(self):
        return {
            "index": self.index,
            "op": self.op.to_dict(),
            "execution": self.execution.to_dict(),
            "step": self.step,
            "attempt": self.attempt,
            "role": self.role,
            "reversed": self.reversed,
            "intent": self.intent,
            "widget_description": self.widget_description,
            "target": self.target,
            "verdicts": list(self.verdicts),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            index=d["index"],
            op=Operation.from_dict(d["op"]),
            execution=ExecutionRecord.from_dict(d["execution"]),
            step=d.get("step", 0),
            attempt=d.get("attempt", 0),
            role=d.get("role", "step"),
            reversed=d.get("reversed", False),
            intent=d.get("intent", ""),
            widget_description=d.get("widget_description", ""),
            target=d.get("target"),
            verdicts=list(d.get("verdicts", [])),
        )


@dataclass
class WorkingMemory:
    scenario: ScenarioSpec
    op_log: list[OperationRecord] = field(default_factory=list)
    dialogue_log: list[DialogueEntry] = field(default_factory=list)

    def op_summary(self) -> str:
        if not self.op_log:
            return "(none yet)"
        return "\n".join(f"{r.index + 1}. {r.summary()}" for r in self.op_log)


@dataclass
class ShortTermMemory:
    current_state: GuiState | None = None
    previous_state: GuiState | None = None


@dataclass
class MemorySnapshot:
    long_term: LongTermMemory
    working: WorkingMemory
    short_term: ShortTermMemory
    session_id: str

    def push_state(self, state: GuiState) -> MemorySnapshot:
        """Rotate the two short-term slots: current becomes previous."""
        if state is None or state.image is None:
            raise ValueError("state must carry a screenshot")
        self.short_term.previous_state = self.short_term.current_state
        self.short_term.current_state = state
        return self

    def replace_current(self, state: GuiState) -> MemorySnapshot:
        """Refresh the current slot without rotating, e.g. after re-perceiving the same page."""
        self.short_term.current_state = state
        return self

    def append_op(self, record: OperationRecord) -> MemorySnapshot:
        if record.execution is None:
            raise ValueError("operation record needs its execution record")
        self.working.op_log.append(record)
        return self

    def append_dialogue(self, prompt: str, response: str, stage: str) -> MemorySnapshot:
        self.working.dialogue_log.append(DialogueEntry(digest(prompt), digest(response), stage))
        return self

    def to_dict(self) -> dict:
        st = self.short_term
        return {
            "session_id": self.session_id,
            "long_term": self.long_term.to_dict(),
            "working": {
                "scenario": self.working.scenario.to_dict(),
                "op_log": [r.to_dict() for r in self.working.op_log],
                "dialogue_log": [e.to_dict() for e in self.working.dialogue_log],
            },
            "short_term": {
                "current_state": st.current_state.to_dict() if st.current_state else None,
                "previous_state": st.previous_state.to_dict() if st.previous_state else None,
            },
        }

    @classmethod
    def from_dict(cls, d) -> MemorySnapshot:
        w = d["working"]
        st = d["short_term"]
        return cls(
            long_term=LongTermMemory.from_dict(d["long_term"]),
            working=WorkingMemory(
                ScenarioSpec.from_dict(w["scenario"]),
                [OperationRecord.from_dict(r) for r in w["op_log"]],
                [DialogueEntry.from_dict(e) for e in w["dialogue_log"]],
            ),
            short_term=ShortTermMemory(
                GuiState.from_dict(st["current_state"]) if st.get("current_state") else None,
                GuiState.from_dict(st["previous_state"]) if st.get("previous_state") else None,
            ),
            session_id=d["session_id"],
        )


def init_session(scenario: ScenarioSpec, device_info: str, app_info: str, app_id: str = "",
                 catalog=()) -> MemorySnapshot:
    if not isinstance(scenario, ScenarioSpec):
        raise ScenarioError("scenario must be a ScenarioSpec")
    if not scenario.description.strip():
        raise ScenarioError("scenario description is empty")
    catalog = tuple(catalog) or (scenario,)
    return MemorySnapshot(
        long_term=LongTermMemory(device_info, app_info, app_id, catalog),
        working=WorkingMemory(scenario),
        short_term=ShortTermMemory(),
        session_id=uuid.uuid4().hex,
    )


# Functional aliases matching the operation names used elsewhere.
def push_state(mem: MemorySnapshot, state: GuiState) -> MemorySnapshot:
    return mem.push_state(state)


def append_op(mem: MemorySnapshot, record: OperationRecord) -> MemorySnapshot:
    return mem.append_op(record)
