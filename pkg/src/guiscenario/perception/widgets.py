"""Widget records produced by the Observer."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from ..raster import BoundingBox, RasterImage


class WidgetKind(str, Enum):
    GRAPHICAL = "graphical"
    TEXTUAL = "textual"
    FUSED = "fused"
    VIRTUAL = "virtual"


@dataclass(frozen=True)
class TextFragment:
    text: str
    box: BoundingBox
    confidence: float = 1.0

    def __post_init__(self):
        if not self.text:
            raise ValueError("text fragment must be non-empty")


@dataclass(frozen=True)
class Widget:
    id: int
    box: BoundingBox
    kind: WidgetKind
    text: str | None = None
    confidence: float = 1.0

    def with_id(self, new_id: int) -> Widget:
        return replace(self, id=new_id)

    def label(self) -> str:
        return self.text if self.text else ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "box": self.box.as_list(),
            "kind": self.kind.value,
            "text": self.text,
            "confidence": round(float(self.confidence), 4),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Widget:
        return cls(
            id=int(d["id"]),
            box=BoundingBox.from_list(d["box"]),
            kind=WidgetKind(d["kind"]),
            text=d.get("text"),
            confidence=float(d.get("confidence", 1.0)),
        )


def reading_order(widgets):
    """Stable sort by box origin: top-to-bottom, then left-to-right."""
    indexed = list(enumerate(widgets))
    indexed.sort(key=lambda iw: (iw[1].box.y, iw[1].box.x, iw[0]))
    return [w for _, w in indexed]


class WidgetSet:
    """Widgets of one screen with dense ids ``1..n`` in reading order."""

    def __init__(self, widgets=()):
        ordered = reading_order(widgets)
        self._widgets = tuple(w.with_id(i) for i, w in enumerate(ordered, start=1))

    def __len__(self):
        return len(self._widgets)

    def __iter__(self):
        return iter(self._widgets)

    def __getitem__(self, idx):
        return self._widgets[idx]

    def __eq__(self, other):
        if not isinstance(other, WidgetSet):
            return NotImplemented
        return self._widgets == other._widgets

    def __repr__(self):
        return f"WidgetSet({list(self._widgets)!r})"

    def get(self, widget_id: int) -> Widget | None:
        if 1 <= widget_id <= len(self._widgets):
            return self._widgets[widget_id - 1]
        return None

    def ids(self) -> list[int]:
        return [w.id for w in self._widgets]

    def describe(self) -> str:
        lines = []
        for w in self._widgets:
            text = f' "{w.text}"' if w.text else ""
            lines.append(f"ID {w.id}: {w.kind.value}{text} at [{w.box.x}, {w.box.y}, {w.box.w}, {w.box.h}]")
        return "\n".join(lines) if lines else "(no widgets recognized)"

    def to_list(self) -> list[dict]:
        return [w.to_dict() for w in self._widgets]

    @classmethod
    def from_list(cls, items) -> WidgetSet:
        ws = cls.__new__(cls)
        ws._widgets = tuple(Widget.from_dict(d) for d in items)
        return ws


@dataclass(frozen=True)
class PerceptionResult:
    widgets: WidgetSet
    annotated: RasterImage
    source: RasterImage

    def __post_init__(self):
        if self.annotated.size != self.source.size:
            raise ValueError("annotated image must match the source dimensions")

    def document(self) -> dict:
        return {
            "widgets": self.widgets.to_list(),
            "image_size": [self.source.width, self.source.height],
        }
