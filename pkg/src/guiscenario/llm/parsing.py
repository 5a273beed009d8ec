"""Response contracts: parsers for model replies and the matching renderers.

Decisions and correction causes come back as one fenced JSON block; verdicts,
widget ids and anchors are single keyword lines. Anything else is a
:class:`ParseFailure`, which the gateway answers with one re-prompt.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..device.operations import ACTION_TYPES, DIRECTIONS
from ..errors import ParseFailure

NOT_FOUND = "NOT_FOUND"
PLACEMENTS = ("above", "below", "left", "right", "inside")
CAUSES = ("localization_error", "missing_preaction", "wrong_logic")

_FENCE = re.compile(r"```[ \t]*(?:json)?[ \t]*\n(.*?)```", re.DOTALL | re.IGNORECASE)
_VERDICT = re.compile(r"VERDICT\s*:\s*(yes|no)\b[ \t]*[-\u2013\u2014:,.]*[ \t]*(.*)", re.IGNORECASE)
_ID = re.compile(r"\bID\s*:\s*(-?\d+)", re.IGNORECASE)
_ANCHOR = re.compile(r"\bANCHOR\s*:\s*(-?\d+)", re.IGNORECASE)
_PLACEMENT = re.compile(r"\bPLACEMENT\s*:\s*([A-Za-z]+)", re.IGNORECASE)


@dataclass(frozen=True)
class AbstractDecision:
    """The model's intended next action before it is tied to a widget."""

    action_type: str
    intent: str = ""
    widget_description: str = ""
    input_text: str | None = None
    scroll_direction: str | None = None

    def __post_init__(self):
        if self.action_type not in ACTION_TYPES:
            raise ValueError(f"unknown action type {self.action_type!r}")
        if (self.action_type == "input") != (self.input_text is not None):
            raise ValueError("input_text must be given exactly for input actions")
        if (self.action_type == "scroll") != (self.scroll_direction is not None):
            raise ValueError("scroll_direction must be given exactly for scroll actions")
        if self.scroll_direction is not None and self.scroll_direction not in DIRECTIONS:
            raise ValueError(f"bad scroll direction {self.scroll_direction!r}")

    def describe(self) -> str:
        parts = [self.action_type]
        if self.widget_description:
            parts.append(f"on {self.widget_description!r}")
        if self.input_text is not None:
            parts.append(f"typing {self.input_text!r}")
        if self.scroll_direction:
            parts.append(f"towards {self.scroll_direction}")
        text = " ".join(parts)
        return f"{text} (intent: {self.intent})" if self.intent else text

    def to_dict(self) -> dict:
        d = {"action": self.action_type, "intent": self.intent, "widget": self.widget_description}
        if self.input_text is not None:
            d["text"] = self.input_text
        if self.scroll_direction is not None:
            d["direction"] = self.scroll_direction
        return d

    @classmethod
    def from_dict(cls, d: dict) -> AbstractDecision:
        return cls(d["action"], d.get("intent", ""), d.get("widget", ""), d.get("text"), d.get("direction"))


@dataclass(frozen=True)
class Verdict:
    verdict: str
    reason: str

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"


@dataclass(frozen=True)
class CorrectionCause:
    cause: str
    evidence: str = ""

    def __post_init__(self):
        if self.cause not in CAUSES:
            raise ValueError(f"unknown correction cause {self.cause!r}")


def _json_block(text: str) -> dict:
    m = _FENCE.search(text)
    if m is None:
        raise ParseFailure("reply has no fenced JSON block")
    try:
        data = json.loads(m.group(1))
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"malformed JSON block: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseFailure("JSON block must be an object")
    return data


def _opt_str(data, key):
    v = data.get(key)
    if v is None:
        return None
    if not isinstance(v, (str, int, float)):
        raise ParseFailure(f"field {key!r} must be text")
    return str(v)


def parse_decision(text: str, action_types=ACTION_TYPES) -> AbstractDecision:
    data = _json_block(text)
    action = _opt_str(data, "action")
    if action is None:
        raise ParseFailure("decision block lacks an action")
    action = action.strip().lower()
    if action not in action_types or action not in ACTION_TYPES:
        raise ParseFailure(f"unknown action type {action!r}")
    input_text = _opt_str(data, "text") if action == "input" else None
    if action == "input" and input_text is None:
        raise ParseFailure("input decision lacks the text to type")
    direction = None
    if action == "scroll":
        direction = (_opt_str(data, "direction") or "").strip().lower()
        if direction not in DIRECTIONS:
            raise ParseFailure(f"scroll decision needs a direction in {DIRECTIONS}")
    # Fields that do not apply to the action type are dropped rather than rejected.
    return AbstractDecision(
        action_type=action,
        intent=_opt_str(data, "intent") or "",
        widget_description=_opt_str(data, "widget") or "",
        input_text=input_text,
        scroll_direction=direction,
    )


def _fenced(data: dict) -> str:
    # Backticks only occur inside JSON strings, where the escape keeps the fence intact.
    return "```json\n" + json.dumps(data, ensure_ascii=False).replace("`", "\\u0060") + "\n```"


def render_decision(dec: AbstractDecision) -> str:
    return _fenced(dec.to_dict())


def parse_verdict(text: str) -> Verdict:
    m = _VERDICT.search(text)
    if m is None:
        raise ParseFailure("reply has no VERDICT token")
    return Verdict(m.group(1).lower(), m.group(2).strip())


def render_verdict(verdict: str, reason: str = "") -> str:
    return f"VERDICT: {verdict} - {reason}" if reason else f"VERDICT: {verdict}"


def parse_widget_id(text: str, valid_ids) -> int | None:
    """Widget id named in the reply, or None for the NOT_FOUND sentinel."""
    m = _ID.search(text)
    if m is None:
        if NOT_FOUND in text.upper():
            return None
        raise ParseFailure("reply names neither an ID nor NOT_FOUND")
    wid = int(m.group(1))
    if wid not in set(valid_ids):
        raise ParseFailure(f"widget id {wid} is not on this screen")
    return wid


def parse_anchor(text: str, valid_ids) -> tuple[int, str]:
    a = _ANCHOR.search(text)
    p = _PLACEMENT.search(text)
    if a is None or p is None:
        raise ParseFailure("reply needs ANCHOR and PLACEMENT lines")
    wid = int(a.group(1))
    if wid not in set(valid_ids):
        raise ParseFailure(f"anchor id {wid} is not on this screen")
    placement = p.group(1).lower()
    if placement not in PLACEMENTS:
        raise ParseFailure(f"unknown placement {placement!r}")
    return wid, placement


def parse_cause(text: str) -> CorrectionCause:
    data = _json_block(text)
    cause = (_opt_str(data, "cause") or "").strip().lower()
    if cause not in CAUSES:
        raise ParseFailure(f"unknown correction cause {cause!r}")
    return CorrectionCause(cause, _opt_str(data, "evidence") or "")


def render_cause(cause: str, evidence: str = "") -> str:
    return _fenced({"cause": cause, "evidence": evidence})
