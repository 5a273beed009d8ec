"""Grounded operations and their execution records."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..raster import BoundingBox


class OpKind(str, Enum):
    CLICK = "click"
    INPUT = "input"
    SCROLL = "scroll"
    BACK = "back"
    DONE = "done"


ACTION_TYPES = tuple(k.value for k in OpKind)
DIRECTIONS = ("up", "down", "left", "right")
OPPOSITE = {"up": "down", "down": "up", "left": "right", "right": "left"}


@dataclass(frozen=True)
class Operation:
    kind: OpKind
    tap_point: tuple[int, int] | None = None
    text: str | None = None
    direction: str | None = None
    region: BoundingBox | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", OpKind(self.kind))
        if self.tap_point is not None:
            object.__setattr__(self, "tap_point", (int(self.tap_point[0]), int(self.tap_point[1])))
        k = self.kind
        if k is OpKind.CLICK and self.tap_point is None:
            raise ValueError("click needs a tap point")
        if k is OpKind.INPUT and (self.tap_point is None or self.text is None):
            raise ValueError("input needs a tap point and text")
        if k is OpKind.SCROLL and self.direction not in DIRECTIONS:
            raise ValueError(f"scroll needs a direction in {DIRECTIONS}")
        if k in (OpKind.BACK, OpKind.DONE) and (self.tap_point is not None or self.region is not None):
            raise ValueError(f"{k.value} takes no coordinates")

    def describe(self) -> str:
        if self.kind is OpKind.CLICK:
            return f"click at {self.tap_point}"
        if self.kind is OpKind.INPUT:
            return f"input {self.text!r} at {self.tap_point}"
        if self.kind is OpKind.SCROLL:
            where = f" in {self.region.as_list()}" if self.region else ""
            return f"scroll {self.direction}{where}"
        return self.kind.value

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.tap_point is not None:
            d["tap_point"] = list(self.tap_point)
        if self.text is not None:
            d["text"] = self.text
        if self.direction is not None:
            d["direction"] = self.direction
        if self.region is not None:
            d["region"] = self.region.as_list()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Operation:
        return cls(
            kind=OpKind(d["kind"]),
            tap_point=tuple(d["tap_point"]) if d.get("tap_point") is not None else None,
            text=d.get("text"),
            direction=d.get("direction"),
            region=BoundingBox.from_list(d["region"]) if d.get("region") else None,
        )


@dataclass
class ExecutionRecord:
    op: Operation
    sub_actions: list[dict] = field(default_factory=list)
    started: float = 0.0
    finished: float = 0.0
    result: str = "ok"

    def to_dict(self) -> dict:
        return {
            "op": self.op.to_dict(),
            "sub_actions": list(self.sub_actions),
            "started": self.started,
            "finished": self.finished,
            "result": self.result,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ExecutionRecord:
        return cls(Operation.from_dict(d["op"]), list(d["sub_actions"]), d["started"], d["finished"], d["result"])
