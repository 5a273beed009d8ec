"""Declarative simulated apps: a screen/transition graph with a deterministic renderer."""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import yaml

from ..errors import DeviceError, SimSpecError
from ..raster import BoundingBox, RasterImage
from .base import VirtualClock
from .operations import DIRECTIONS
from .render import WIDGET_KINDS, Rendered, render

log = logging.getLogger(__name__)

DEFAULT_SIZE = (720, 1280)
EVENT_KINDS = ("tap", "input", "scroll", "back")


def _matcher(on) -> tuple[str, object]:
    """Normalize ``{"tap": "login"}`` / ``"tap:login"`` / ``{"back": true}`` to (kind, arg)."""
    if isinstance(on, str):
        kind, _, arg = on.partition(":")
        arg = arg or None
    elif isinstance(on, dict) and len(on) == 1:
        (kind, arg), = on.items()
    else:
        raise SimSpecError(f"bad event matcher {on!r}")
    if kind not in EVENT_KINDS:
        raise SimSpecError(f"unknown event kind {kind!r}")
    if kind == "back":
        arg = None
    if kind == "scroll" and arg is not None and arg not in DIRECTIONS:
        raise SimSpecError(f"bad scroll direction {arg!r}")
    return kind, arg


@dataclass
class Transition:
    on: tuple[str, object]
    to: str | None = None
    guard: dict = field(default_factory=dict)
    log_emit: str | None = None
    set: dict = field(default_factory=dict)
    append: dict = field(default_factory=dict)
    replace: bool = False

    def matches(self, event) -> bool:
        kind, arg = self.on
        return kind == event[0] and (arg is None or arg == event[1])


@dataclass
class Screen:
    id: str
    widgets: list[dict]
    transitions: list[Transition]
    loading_frames: int = 0


@dataclass
class SimAppSpec:
    app_id: str
    screens: dict[str, Screen]
    initial_screen: str
    width: int = DEFAULT_SIZE[0]
    height: int = DEFAULT_SIZE[1]
    name: str = ""
    description: str = ""
    device_name: str = "sim-device"
    back_stack: bool = True
    crash_points: list[dict] = field(default_factory=list)
    goals: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, data: dict) -> SimAppSpec:
        try:
            size = data.get("screen_size") or list(DEFAULT_SIZE)
            width, height = int(size[0]), int(size[1])
            screens = {}
            for sid, sd in data["screens"].items():
                widgets = []
                seen = set()
                for wd in sd.get("widgets", []):
                    wid = str(wd.get("id", wd.get("id_hint")))
                    if wid in seen:
                        raise SimSpecError(f"duplicate widget id {wid!r} on screen {sid!r}")
                    seen.add(wid)
                    kind = wd.get("kind", "button")
                    if kind not in WIDGET_KINDS:
                        raise SimSpecError(f"unknown widget kind {kind!r}")
                    box = [int(v) for v in wd["box"]] + [0, 0]
                    box = tuple(box[:4])
                    w = dict(wd, id=wid, kind=kind, box=box)
                    w.setdefault("editable", kind == "input")
                    widgets.append(w)
                transitions = [
                    Transition(
                        on=_matcher(td["on"]),
                        to=td.get("to"),
                        guard=dict(td.get("guard") or {}),
                        log_emit=td.get("log_emit"),
                        set=dict(td.get("set") or {}),
                        append=dict(td.get("append") or {}),
                        replace=bool(td.get("replace", False)),
                    )
                    for td in sd.get("transitions", [])
                ]
                screens[sid] = Screen(sid, widgets, transitions, int(sd.get("loading_frames", 0)))
            crash_points = []
            for cp in data.get("crash_points", []):
                crash_points.append({"screen": cp["screen"], "event": _matcher(cp["event"]), "log_line": cp["log_line"]})
            spec = cls(
                app_id=data["app_id"],
                screens=screens,
                initial_screen=data["initial_screen"],
                width=width,
                height=height,
                name=data.get("name", ""),
                description=data.get("description", ""),
                device_name=data.get("device_name", "sim-device"),
                back_stack=bool(data.get("back_stack", True)),
                crash_points=crash_points,
                goals=dict(data.get("goals") or {}),
                raw=copy.deepcopy(data),
            )
        except KeyError as exc:
            raise SimSpecError(f"missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SimSpecError):
                raise
            raise SimSpecError(str(exc)) from exc
        spec.validate()
        return spec

    @classmethod
    def load(cls, path) -> SimAppSpec:
        text = Path(path).read_text()
        data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)

    def validate(self):
        if self.initial_screen not in self.screens:
            raise SimSpecError(f"initial screen {self.initial_screen!r} is not declared")
        for s in self.screens.values():
            ids = {w["id"] for w in s.widgets}
            for w in s.widgets:
                x, y, bw, bh = w["box"]
                if w["kind"] == "label" and not (bw and bh):
                    ok = x >= 0 and y >= 0 and x < self.width and y < self.height
                else:
                    ok = x >= 0 and y >= 0 and bw > 0 and bh > 0 and x + bw <= self.width and y + bh <= self.height
                if not ok:
                    raise SimSpecError(f"widget {w['id']!r} on {s.id!r} is out of bounds")
            for t in s.transitions:
                if t.to is not None and t.to not in self.screens:
                    raise SimSpecError(f"transition target {t.to!r} from {s.id!r} is not declared")
                for key in list(t.guard) + list(t.set) + list(t.append):
                    if key not in ids:
                        raise SimSpecError(f"transition on {s.id!r} refers to unknown widget {key!r}")
        for cp in self.crash_points:
            if cp["screen"] not in self.screens:
                raise SimSpecError(f"crash point screen {cp['screen']!r} is not declared")
        for goal in self.goals.values():
            if goal.get("screen") not in self.screens:
                raise SimSpecError(f"goal screen {goal.get('screen')!r} is not declared")


def format_log_ts(ts: float) -> str:
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    return dt.strftime("%Y-%m-%d %H:%M:%S.") + f"{dt.microsecond // 1000:03d}"


class SimBackend:
    """In-process device running a :class:`SimAppSpec`.

    Taps hit the topmost (last-declared) widget under the point. A tap on an
    editable widget focuses it and opens the soft keyboard; ``back`` first
    closes the keyboard, then follows a declared back transition, then pops
    the navigation stack.
    """

    ACTION_SECONDS = 0.1
    PID = 4242

    def __init__(self, spec: SimAppSpec, clock=None):
        self.spec = spec
        self.clock = clock or VirtualClock()
        self.screen_id = spec.initial_screen
        self.stack: list[str] = []
        self.values: dict[tuple[str, str], str] = {}
        for s in spec.screens.values():
            for w in s.widgets:
                if w.get("value") is not None:
                    self.values[(s.id, w["id"])] = str(w["value"])
        self.focus: str | None = None
        self.keyboard = False
        self.loading_left = spec.screens[self.screen_id].loading_frames
        self.logs: list[tuple[float, str]] = []
        self.events: list[dict] = []
        self.connected = True

    # contract

    def info(self) -> dict:
        return {
            "device_info": f"{self.spec.device_name} (simulated, {self.spec.width}x{self.spec.height})",
            "app_id": self.spec.app_id,
            "app_info": self.spec.description or self.spec.name or self.spec.app_id,
        }

    def screenshot(self) -> RasterImage:
        self._check()
        loading = self.loading_left > 0
        if loading:
            self.loading_left -= 1
        return self.render(loading=loading).image

    def render(self, loading=False) -> Rendered:
        screen = self.spec.screens[self.screen_id]
        vals = {wid: v for (sid, wid), v in self.values.items() if sid == self.screen_id}
        return render(self.spec.width, self.spec.height, screen.widgets, vals, loading=loading)

    def tap(self, point):
        self._check()
        x, y = point
        if not (0 <= x < self.spec.width and 0 <= y < self.spec.height):
            raise DeviceError(f"tap {point} outside the screen")
        hit = self.hit_test(x, y)
        before = self.screen_id
        fired = self._dispatch(("tap", hit))
        if not fired and hit is not None and self._widget(hit).get("editable"):
            self.focus, self.keyboard = hit, True
        elif not fired:
            self.focus, self.keyboard = None, False
        self._log_event("tap", before, widget=hit, point=[int(x), int(y)])

    def input_text(self, text):
        self._check()
        before = self.screen_id
        if self.focus is None:
            self._log_event("input", before, widget=None, text=text)
            return
        key = (self.screen_id, self.focus)
        self.values[key] = self.values.get(key, "") + text
        widget = self.focus
        self._dispatch(("input", widget))
        self._log_event("input", before, widget=widget, text=text)

    def clear_text(self) -> bool:
        self._check()
        if self.focus is None:
            return False
        self.values[(self.screen_id, self.focus)] = ""
        self._log_event("clear", self.screen_id, widget=self.focus)
        return True

    def scroll(self, direction, region=None):
        self._check()
        if direction not in DIRECTIONS:
            raise DeviceError(f"bad scroll direction {direction!r}")
        before = self.screen_id
        self._dispatch(("scroll", direction))
        self._log_event("scroll", before, direction=direction)

    def back(self):
        self._check()
        before = self.screen_id
        if self.keyboard:
            self.keyboard, self.focus = False, None
        elif not self._dispatch(("back", None)) and self.spec.back_stack and self.stack:
            self._enter(self.stack.pop(), push=False)
        self._log_event("back", before)

    def read_log_since(self, ts: float) -> list[str]:
        return [line for t, line in self.logs if t >= ts]

    # sim-only helpers

    def goal_reached(self, scenario_name: str) -> bool | None:
        goal = self.spec.goals.get(scenario_name) or self.spec.goals.get("*")
        if goal is None:
            return None
        if self.screen_id != goal["screen"]:
            return False
        for wid, expected in (goal.get("texts") or {}).items():
            if self.values.get((goal["screen"], wid), "") != expected:
                return False
        return True

    def hit_test(self, x, y) -> str | None:
        hits = self.render().hit_boxes
        screen = self.spec.screens[self.screen_id]
        for w in reversed(screen.widgets):
            box = hits.get(w["id"])
            if box is not None and box.contains_point(x, y):
                return w["id"]
        return None

    def widget_box(self, widget_id: str) -> BoundingBox:
        return self.render().hit_boxes[widget_id]

    def _widget(self, wid):
        for w in self.spec.screens[self.screen_id].widgets:
            if w["id"] == wid:
                return w
        raise KeyError(wid)

    def _check(self):
        if not self.connected:
            raise DeviceError("simulated device disconnected")
        self.clock.advance(self.ACTION_SECONDS)

    def _guard_ok(self, t: Transition) -> bool:
        return all(self.values.get((self.screen_id, wid), "") == str(v) for wid, v in t.guard.items())

    def _dispatch(self, event) -> bool:
        for cp in self.spec.crash_points:
            kind, arg = cp["event"]
            if cp["screen"] == self.screen_id and kind == event[0] and (arg is None or arg == event[1]):
                self._emit(cp["log_line"], level="E", tag="AndroidRuntime")
                return True
        for t in self.spec.screens[self.screen_id].transitions:
            if t.matches(event) and self._guard_ok(t):
                for wid, v in t.set.items():
                    self.values[(self.screen_id, wid)] = str(v)
                for wid, v in t.append.items():
                    key = (self.screen_id, wid)
                    self.values[key] = self.values.get(key, "") + str(v)
                if t.log_emit:
                    self._emit(t.log_emit)
                if t.to is not None and t.to != self.screen_id:
                    self._enter(t.to, push=not t.replace)
                return True
        return False

    def _enter(self, screen_id, push):
        if push:
            self.stack.append(self.screen_id)
        self.screen_id = screen_id
        self.focus, self.keyboard = None, False
        self.loading_left = self.spec.screens[screen_id].loading_frames

    def _emit(self, text, level="I", tag="SimApp"):
        ts = self.clock.now()
        stamp = format_log_ts(ts)
        for part in str(text).splitlines():
            self.logs.append((ts, f"{stamp} {self.PID:5d} {self.PID:5d} {level} {tag}: {part}"))

    def _log_event(self, kind, before, **extra):
        self.events.append(dict(kind=kind, screen_before=before, screen_after=self.screen_id, **extra))
