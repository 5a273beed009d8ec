"""The Decider: logical decision, widget localization and self-correction.

A step first asks the model for an abstract action over the raw screenshot,
then grounds it on the perceived widget set. When the target was not
recognized the model picks an anchor and a placement and a virtual box is
built next to the anchor. Input actions aimed at a plain text label are
moved into the blank area to the right of the label.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .device.operations import ACTION_TYPES, Operation
from .errors import StepError
from .llm.parsing import (
    AbstractDecision,
    CorrectionCause,
    parse_anchor,
    parse_cause,
    parse_decision,
    parse_verdict,
    parse_widget_id,
)
from .perception.widgets import PerceptionResult, Widget, WidgetKind
from .raster import BoundingBox

# Widget descriptions that mean "the whole screen" for scrolls.
WHOLE_SCREEN = {"", "screen", "page", "whole screen", "the screen", "the page"}


@dataclass(frozen=True)
class LocatedDecision:
    abstract: AbstractDecision
    widget_id: int | None = None          # recognized widget that was matched or used as anchor
    target_box: BoundingBox | None = None
    tap_point: tuple[int, int] | None = None
    source: str = "none"                  # match | virtual | adjusted | none

    def __post_init__(self):
        if self.target_box is not None and self.tap_point is not None:
            if not self.target_box.contains_point(*self.tap_point):
                raise ValueError(f"tap point {self.tap_point} outside target {self.target_box}")

    def operation(self) -> Operation:
        a = self.abstract
        if a.action_type == "scroll":
            return Operation("scroll", direction=a.scroll_direction, region=self.target_box)
        if a.action_type in ("back", "done"):
            return Operation(a.action_type)
        return Operation(a.action_type, tap_point=self.tap_point, text=a.input_text)

    def to_dict(self) -> dict:
        return {
            "decision": self.abstract.to_dict(),
            "widget_id": self.widget_id,
            "target_box": self.target_box.as_list() if self.target_box else None,
            "tap_point": list(self.tap_point) if self.tap_point else None,
            "source": self.source,
        }


@dataclass(frozen=True)
class FailureEvidence:
    """What the Supervisor saw when a step failed; appended to replayed prompts."""

    decision: AbstractDecision
    op_description: str
    transition_reason: str
    changed: bool
    reversed: bool
    located: LocatedDecision | None = None

    def text(self) -> str:
        t = f"the operation {self.op_description} (planned as {self.decision.describe()}) "
        t += f"did not produce the expected page change: {self.transition_reason or 'no reason given'}."
        if self.reversed:
            t += " Its effect was undone, so the screen is back to the state before it."
        elif not self.changed:
            t += " The page did not change."
        return t


def context_slots(mem, action_types=ACTION_TYPES) -> dict:
    return {
        "preamble": mem.long_term.preamble(),
        "scenario": mem.working.scenario.prompt_text(),
        "op_log": mem.working.op_summary(),
        "action_types": ", ".join(action_types),
    }


def needs_localization(dec: AbstractDecision) -> bool:
    if dec.action_type in ("back", "done"):
        return False
    if dec.action_type == "scroll":
        return dec.widget_description.strip().lower() not in WHOLE_SCREEN
    return True


def decide_logical(mem, gw, action_types=ACTION_TYPES, extra: str = "") -> AbstractDecision:
    state = mem.short_term.current_state
    if state is None:
        raise StepError("no current GUI state to decide on")
    dec, _ = gw.ask(
        "logical_decision",
        lambda text: parse_decision(text, action_types),
        images=(state.image,),
        extra=extra,
        **context_slots(mem, action_types),
    )
    return dec


def _matched(dec: AbstractDecision, widget: Widget) -> LocatedDecision:
    return LocatedDecision(dec, widget.id, widget.box, widget.box.center_px(), "match")


def locate_widget(dec: AbstractDecision, perception: PerceptionResult, gw, mem,
                  extra: str = "") -> LocatedDecision | None:
    """Ask for the target's id; None means the model answered NOT_FOUND."""
    widgets = perception.widgets
    wid, _ = gw.ask(
        "widget_localization",
        lambda text: parse_widget_id(text, widgets.ids()),
        images=(perception.source, perception.annotated),
        widget_list=widgets.describe() or "(no widgets recognized)",
        extra=dec.describe() + (f"\n{extra}" if extra else ""),
        **context_slots(mem),
    )
    if wid is None:
        return None
    return _matched(dec, widgets.get(wid))


def virtual_box(anchor: BoundingBox, placement: str, width: int, height: int) -> BoundingBox | None:
    """Anchor-sized box one anchor extent away, clipped to the screen."""
    x, y, w, h = anchor.x, anchor.y, anchor.w, anchor.h
    if placement == "right":
        x += w
    elif placement == "left":
        x -= w
    elif placement == "above":
        y -= h
    elif placement == "below":
        y += h
    elif placement == "inside":
        w2, h2 = max(w // 2, 1), max(h // 2, 1)
        x, y, w, h = x + (w - w2) // 2, y + (h - h2) // 2, w2, h2
    else:
        raise ValueError(f"unknown placement {placement!r}")
    return BoundingBox(x, y, w, h).clip(width, height)


def predict_virtual_widget(dec: AbstractDecision, perception: PerceptionResult, gw, mem) -> LocatedDecision:
    widgets = perception.widgets
    if not len(widgets):
        raise StepError("no recognized widget to anchor a prediction on")
    try:
        (anchor_id, placement), _ = gw.ask(
            "widget_prediction",
            lambda text: parse_anchor(text, widgets.ids()),
            images=(perception.source, perception.annotated),
            widget_list=widgets.describe(),
            extra=dec.describe(),
            **context_slots(mem),
        )
    except StepError as exc:
        raise StepError(f"widget prediction failed: {exc}") from exc
    img = perception.source
    box = virtual_box(widgets.get(anchor_id).box, placement, img.width, img.height)
    if box is None:
        raise StepError(f"virtual widget {placement} of {anchor_id} falls outside the screen")
    return LocatedDecision(dec, anchor_id, box, box.center_px(), "virtual")


def adjustment_region(label: BoundingBox, others, width: int) -> BoundingBox | None:
    """Blank area right of ``label`` up to the next widget on the same row or the screen edge."""
    right = width
    for b in others:
        overlaps_row = b.y < label.y2 and label.y < b.y2
        if overlaps_row and b.x >= label.x2:
            right = min(right, b.x)
    if right - label.x2 <= 0:
        return None
    return BoundingBox(label.x2, label.y, right - label.x2, label.h)


def adjust_location(loc: LocatedDecision, perception: PerceptionResult, gw, mem) -> LocatedDecision:
    if loc.abstract.action_type != "input" or loc.source != "match":
        return loc
    widget = perception.widgets.get(loc.widget_id)
    if widget is None or widget.kind is not WidgetKind.TEXTUAL:
        # Bordered boxes are input areas already.
        return loc
    verdict, _ = gw.ask(
        "location_adjustment",
        parse_verdict,
        images=(perception.source, perception.annotated),
        widget_list=perception.widgets.describe(),
        extra=f"{loc.abstract.describe()}; matched widget ID {widget.id}",
        **context_slots(mem),
    )
    if not verdict.yes:
        return loc
    others = [w.box for w in perception.widgets if w.id != widget.id]
    region = adjustment_region(widget.box, others, perception.source.width)
    if region is None:
        return LocatedDecision(loc.abstract, widget.id, widget.box, widget.box.center_px(), "match")
    return LocatedDecision(loc.abstract, widget.id, region, region.center_px(), "adjusted")


def ground(dec: AbstractDecision, loc: LocatedDecision | None, perception, gw, mem) -> LocatedDecision:
    """Finish a localization: prediction on NOT_FOUND, then label adjustment."""
    if loc is None:
        loc = predict_virtual_widget(dec, perception, gw, mem)
    return adjust_location(loc, perception, gw, mem)


def locate(dec: AbstractDecision, perception: PerceptionResult, gw, mem, extra: str = "") -> LocatedDecision:
    if not needs_localization(dec):
        return LocatedDecision(dec)
    return ground(dec, locate_widget(dec, perception, gw, mem, extra), perception, gw, mem)


@dataclass
class CorrectionBudget:
    max_corrections: int = 2
    used: int = 0
    causes: list = field(default_factory=list)

    @property
    def exhausted(self) -> bool:
        return self.used >= self.max_corrections

    def spend(self, cause: CorrectionCause):
        if self.exhausted:
            raise StepError("correction budget exhausted")
        self.used += 1
        self.causes.append(cause.cause)


def self_correct(mem, failure: FailureEvidence, gw, perception: PerceptionResult,
                 action_types=ACTION_TYPES):
    """Classify why the step failed and re-enter the matching decision stage.

    Returns ``(cause, new)`` where ``new`` is a :class:`LocatedDecision` for
    localization errors and an :class:`AbstractDecision` otherwise.
    """
    st = mem.short_term
    images = tuple(s.image for s in (st.previous_state, st.current_state) if s is not None)
    cause, _ = gw.ask("self_correction", parse_cause, images=images, extra=failure.text(),
                      **context_slots(mem, action_types))
    note = f"Previous attempt: {failure.text()} Cause: {cause.cause}. {cause.evidence}".strip()
    if cause.cause == "localization_error" and needs_localization(failure.decision):
        loc = locate_widget(failure.decision, perception, gw, mem, extra=note + " Pick a different widget.")
        return cause, ground(failure.decision, loc, perception, gw, mem)
    dec = decide_logical(mem, gw, action_types, extra=note)
    return cause, dec


__all__ = [
    "CorrectionBudget", "FailureEvidence", "LocatedDecision", "adjust_location",
    "adjustment_region", "context_slots", "decide_logical", "ground", "locate", "locate_widget",
    "needs_localization", "predict_virtual_widget", "self_correct", "virtual_box",
]
