"""Desk-scale fixture catalog: simulated apps paired with scripted model replies.

Each fixture declares a sim app, a scenario and the backend events a correct
run must produce (written by hand from the app graph). The script is authored
by :class:`Author`, which walks its own copy of the sim app the way the engine
will and answers each prompt the way a well-behaved model would: widget ids
are read off the perceived widget set of the screen it is looking at.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .decider import LocatedDecision, adjustment_region, virtual_box
from .device.executor import execute
from .device.sim import SimAppSpec, SimBackend
from .llm.messages import Stage, Usage
from .llm.parsing import AbstractDecision, render_cause, render_decision, render_verdict
from .llm.providers import ScriptEntry, ScriptedProvider
from .memory import ScenarioSpec
from .perception.ocr import FixtureOcr
from .perception.pipeline import perceive
from .perception.widgets import PerceptionResult
from .supervisor import undo

W, H = 480, 800

# Token usage per scripted reply: (prompt, completion) by stage.
STAGE_USAGE = {
    Stage.LOGICAL_DECISION: (1480, 64),
    Stage.WIDGET_LOCALIZATION: (2210, 6),
    Stage.LOADING_CHECK: (760, 11),
    Stage.TRANSITION_CHECK: (1655, 14),
    Stage.COMPLETION_CHECK: (1590, 13),
    Stage.SELF_CORRECTION: (1820, 41),
}


class Author:
    """Builds a script by replaying the intended run against a private sim backend."""

    def __init__(self, spec: SimAppSpec):
        self.backend = SimBackend(spec)
        self.ocr = FixtureOcr()
        self.entries: list[ScriptEntry] = []
        self.perception: PerceptionResult | None = None
        self.stabilize()

    # script writing

    def add(self, stage: Stage, text: str, prompt: str | None = None):
        base_p, base_c = STAGE_USAGE[stage]
        jitter = len(self.entries) % 7
        self.entries.append(ScriptEntry(stage, text, Usage(base_p + 13 * jitter, base_c + jitter), prompt))

    def stabilize(self):
        """Answer loading checks until the page settles, as the engine polls."""
        while True:
            loading = self.backend.loading_left > 0
            image = self.backend.screenshot()
            self.add(Stage.LOADING_CHECK, render_verdict("yes" if loading else "no",
                                                         "spinner shown" if loading else "content visible"),
                     "loading_check")
            if not loading:
                self.perception = perceive(image, self.ocr)
                return

    @property
    def image(self):
        return self.perception.source

    def widget_id(self, hint: str) -> int:
        truth = {t.id_hint: t for t in self.backend.render().truth}
        if hint not in truth:
            raise KeyError(f"{hint!r} is not visible on {self.backend.screen_id!r}")
        box = truth[hint].box
        best = max(self.perception.widgets, key=lambda w: w.box.iou(box), default=None)
        if best is None or best.box.iou(box) < 0.5:
            raise KeyError(f"{hint!r} was not recognized on {self.backend.screen_id!r}")
        return best.id

    # model replies

    def decide(self, action, widget="", intent="", text=None, direction=None):
        dec = AbstractDecision(action, intent, widget, text, direction)
        self.add(Stage.LOGICAL_DECISION, "Next action:\n" + render_decision(dec), "logical_decision")
        return dec

    def match(self, dec, hint) -> LocatedDecision:
        wid = self.widget_id(hint)
        self.add(Stage.WIDGET_LOCALIZATION, f"ID: {wid}", "widget_localization")
        w = self.perception.widgets.get(wid)
        loc = LocatedDecision(dec, wid, w.box, w.box.center_px(), "match")
        if dec.action_type == "input" and w.kind.value == "textual":
            self.add(Stage.WIDGET_LOCALIZATION, render_verdict("no", "this is the input field"),
                     "location_adjustment")
        return loc

    def match_label(self, dec, label_hint) -> LocatedDecision:
        """Input aimed at a display label; the model confirms it is only a label."""
        wid = self.widget_id(label_hint)
        self.add(Stage.WIDGET_LOCALIZATION, f"ID: {wid}", "widget_localization")
        self.add(Stage.WIDGET_LOCALIZATION, render_verdict("yes", "plain label, the field is to its right"),
                 "location_adjustment")
        w = self.perception.widgets.get(wid)
        region = adjustment_region(w.box, [o.box for o in self.perception.widgets if o.id != wid], W)
        return LocatedDecision(dec, wid, region, region.center_px(), "adjusted")

    def predict(self, dec, anchor_hint, placement) -> LocatedDecision:
        self.add(Stage.WIDGET_LOCALIZATION, "NOT_FOUND", "widget_localization")
        wid = self.widget_id(anchor_hint)
        self.add(Stage.WIDGET_LOCALIZATION, f"ANCHOR: {wid}\nPLACEMENT: {placement}", "widget_prediction")
        box = virtual_box(self.perception.widgets.get(wid).box, placement, W, H)
        return LocatedDecision(dec, wid, box, box.center_px(), "virtual")

    def act(self, loc: LocatedDecision):
        self.prev = self.image
        execute(loc.operation(), self.backend)
        self.stabilize()

    def passed(self, complete=False):
        self.add(Stage.TRANSITION_CHECK, render_verdict("yes", "page changed as expected"), "transition_check")
        self.add(Stage.COMPLETION_CHECK, render_verdict("yes" if complete else "no",
                                                        "scenario finished" if complete else "more to do"),
                 "completion_check")

    def failed(self, changed: bool):
        self.add(Stage.TRANSITION_CHECK, render_verdict("no", "not the expected page"), "transition_check")
        if self.prev == self.image:
            return
        self.add(Stage.TRANSITION_CHECK, render_verdict("yes" if changed else "no", "operation effect"),
                 "change_check")
        if changed:
            undo(self.last_op, self.backend, execute)
            self.stabilize()

    def act_and_fail(self, loc, changed=True):
        self.last_op = loc.operation()
        self.act(loc)
        self.failed(changed)

    def cause(self, cause, evidence=""):
        self.add(Stage.SELF_CORRECTION, "Analysis:\n" + render_cause(cause, evidence), "self_correction")

    def step(self, dec, loc, complete=False):
        self.act(loc)
        self.passed(complete)

    def done(self):
        self.decide("done", intent="scenario complete")

    def provider(self) -> ScriptedProvider:
        return ScriptedProvider(list(self.entries))

    def script(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]


@dataclass
class Fixture:
    name: str
    shape: str
    app: dict
    scenario: ScenarioSpec
    author: object
    expected_events: list[tuple]
    expected_case: str = "c1"
    expected_steps: int = 0
    expected_causes: tuple[str, ...] = ()
    expected_bugs: int = 0
    expected_bug_op: int | None = None
    tags: tuple[str, ...] = field(default_factory=tuple)

    def spec(self) -> SimAppSpec:
        return SimAppSpec.from_dict(self.app)

    def build(self) -> Author:
        a = Author(self.spec())
        self.author(a)
        return a

    def script(self) -> list[dict]:
        return self.build().script()


def events_of(backend: SimBackend) -> list[tuple]:
    """Compact view of a sim event log: (kind, widget or argument)."""
    out = []
    for e in backend.events:
        if e["kind"] == "input":
            out.append(("input", e["widget"], e["text"]))
        elif e["kind"] == "scroll":
            out.append(("scroll", e["direction"]))
        elif e["kind"] == "back":
            out.append(("back",))
        else:
            out.append((e["kind"], e.get("widget")))
    return out


# App builders. Coordinates are for a 480x800 screen.


def _app(app_id, name, screens, initial, goal=None, **extra):
    d = {
        "app_id": app_id,
        "name": name,
        "description": f"{name} (simulated)",
        "screen_size": [W, H],
        "initial_screen": initial,
        "screens": screens,
    }
    if goal:
        d["goals"] = {"*": goal}
    d.update(extra)
    return d


def _label(wid, x, y, text, w=0, h=0, **kw):
    return {"id": wid, "kind": "label", "box": [x, y, w, h], "label": text, **kw}


def _button(wid, x, y, w, h, text, **kw):
    return {"id": wid, "kind": "button", "box": [x, y, w, h], "label": text, **kw}


def _input(wid, x, y, w, h, hint, **kw):
    return {"id": wid, "kind": "input", "box": [x, y, w, h], "label": hint, **kw}


def _icon(wid, x, y, w, h, glyph, caption="", **kw):
    return {"id": wid, "kind": "icon", "box": [x, y, w, h], "glyph": glyph, "label": caption, **kw}


def _field(wid, x, y, w, h):
    """Borderless editable area: invisible until something is typed into it."""
    return {"id": wid, "kind": "label", "box": [x, y, w, h], "label": "", "editable": True}


def _tap(wid, to=None, **kw):
    d = {"on": {"tap": wid}, **kw}
    if to:
        d["to"] = to
    return d


LOGIN_APP = _app("demo.mail", "Demo Mail", {
    "login": {
        "widgets": [
            _label("title", 40, 90, "Sign in to Demo Mail", 0, 30),
            _input("email", 40, 170, 400, 56, "Email"),
            _input("password", 40, 250, 400, 56, "Password", secret=True),
            _button("login", 40, 340, 400, 56, "Log in"),
        ],
        "transitions": [_tap("login", "inbox", guard={"email": "amy@demo.io", "password": "pw123"})],
    },
    "inbox": {"widgets": [_label("head", 40, 90, "Inbox", 0, 30), _label("msg", 40, 160, "Welcome back, Amy", 0, 30)]},
}, "login", goal={"screen": "inbox"})


def _login(a: Author):
    d = a.decide("input", "Email field", "enter the account email", text="amy@demo.io")
    a.step(d, a.match(d, "email"))
    d = a.decide("input", "Password field", "enter the password", text="pw123")
    a.step(d, a.match(d, "password"))
    d = a.decide("click", "Log in button", "submit the credentials")
    a.step(d, a.match(d, "login"), complete=True)


LABEL_LOGIN_APP = _app("demo.bank", "Demo Bank", {
    "login": {
        "widgets": [
            _label("title", 40, 90, "Demo Bank", 0, 30),
            _label("user_lbl", 40, 180, "User:", 90, 40),
            _field("user", 150, 180, 290, 40),
            _label("pin_lbl", 40, 250, "PIN:", 90, 40),
            _field("pin", 150, 250, 290, 40),
            _button("go", 40, 340, 400, 56, "Continue"),
        ],
        "transitions": [_tap("go", "accounts", guard={"user": "amy", "pin": "4321"})],
    },
    "accounts": {"widgets": [_label("head", 40, 90, "Accounts", 0, 30), _label("bal", 40, 160, "Balance 120.00", 0, 30)]},
}, "login", goal={"screen": "accounts"})


def _label_login(a: Author):
    d = a.decide("input", "area next to the User: label", "type the user name", text="amy")
    a.step(d, a.match_label(d, "user_lbl"))
    d = a.decide("input", "area next to the PIN: label", "type the PIN", text="4321")
    a.step(d, a.match_label(d, "pin_lbl"))
    d = a.decide("click", "Continue button", "sign in")
    a.step(d, a.match(d, "go"), complete=True)


NOTES_MENU_APP = _app("demo.notes", "Demo Notes", {
    "home": {
        "widgets": [
            _icon("menu", 24, 70, 56, 56, "="),
            _label("title", 110, 83, "My notes", 0, 30),
            _label("empty", 40, 200, "No notes yet", 0, 30),
        ],
        "transitions": [_tap("menu", "drawer")],
    },
    "drawer": {
        "widgets": [
            _button("new", 20, 90, 300, 56, "New note"),
            _button("settings", 20, 160, 300, 56, "Settings"),
        ],
        "transitions": [_tap("new", "editor", replace=True), _tap("settings", "prefs")],
    },
    "prefs": {"widgets": [_label("head", 40, 90, "Settings", 0, 30)]},
    "editor": {
        "widgets": [
            _input("title", 20, 90, 440, 56, "Title"),
            _button("save", 300, 700, 160, 56, "Save"),
        ],
        "transitions": [_tap("save", "saved", guard={"title": "Groceries"})],
    },
    "saved": {"widgets": [_label("head", 40, 90, "Note saved", 0, 30), _label("item", 40, 160, "Groceries", 0, 30)]},
}, "home", goal={"screen": "saved"})


def _notes_menu(a: Author):
    d = a.decide("click", "menu icon top-left", "open the navigation menu")
    a.step(d, a.match(d, "menu"))
    d = a.decide("click", "New note entry", "start a new note")
    a.step(d, a.match(d, "new"))
    d = a.decide("input", "Title field", "name the note", text="Groceries")
    a.step(d, a.match(d, "title"))
    d = a.decide("click", "Save button", "store the note")
    a.step(d, a.match(d, "save"), complete=True)


NOTES_PLUS_APP = _app("demo.jot", "Jot", {
    "home": {
        "widgets": [_label("title", 40, 83, "Jot", 0, 30), _icon("add", 380, 680, 72, 72, "+")],
        "transitions": [_tap("add", "editor")],
    },
    "editor": {
        "widgets": [
            _input("body", 20, 90, 440, 56, "Write something"),
            _button("save", 300, 700, 160, 56, "Save"),
        ],
        "transitions": [_tap("save", "list", guard={"body": "meeting at 3pm"})],
    },
    "list": {"widgets": [_label("head", 40, 83, "Jot", 0, 30), _label("item", 40, 160, "meeting at 3pm", 0, 30)]},
}, "home", goal={"screen": "list"})


def _notes_plus(a: Author):
    d = a.decide("click", "plus icon bottom-right", "open composer")
    a.step(d, a.match(d, "add"))
    d = a.decide("input", "note body field", "write the note", text="meeting at 3pm")
    a.step(d, a.match(d, "body"))
    d = a.decide("click", "Save button", "store the note")
    a.step(d, a.match(d, "save"), complete=True)


def _calc_app(app_id, target_expr, result):
    keys = [["7", "8", "9", "/"], ["4", "5", "6", "*"], ["1", "2", "3", "-"], ["C", "0", "=", "+"]]
    names = {"/": "div", "*": "mul", "-": "sub", "+": "add", "=": "eq", "C": "clr"}
    widgets = [_label("display", 40, 120, "", 400, 60)]
    transitions = []
    for r, row in enumerate(keys):
        for c, k in enumerate(row):
            wid = "k" + names.get(k, k)
            widgets.append(_button(wid, 20 + c * 115, 300 + r * 105, 100, 90, k))
            if k == "=":
                transitions.append(_tap(wid, guard={"display": target_expr}, set={"display": result}))
            elif k == "C":
                transitions.append(_tap(wid, set={"display": ""}))
            else:
                transitions.append(_tap(wid, append={"display": k}))
    return _app(app_id, "Calculator", {"calc": {"widgets": widgets, "transitions": transitions}}, "calc",
                goal={"screen": "calc", "texts": {"display": result}})


CALC_ADD_APP = _calc_app("demo.calc", "12+7", "19")
CALC_MUL_APP = _calc_app("demo.calc", "9*8", "72")


def _keys(seq):
    def author(a: Author):
        for i, k in enumerate(seq):
            d = a.decide("click", f"key {k}", f"press {k}")
            a.step(d, a.match(d, "k" + {"+": "add", "*": "mul", "=": "eq"}.get(k, k)), complete=i == len(seq) - 1)
    return author


EMAIL_APP = _app("demo.mail", "Demo Mail", {
    "inbox": {
        "widgets": [_label("head", 40, 83, "Inbox", 0, 30), _icon("compose", 380, 660, 72, 72, "+", "Compose")],
        "transitions": [_tap("compose", "compose")],
    },
    "compose": {
        "widgets": [
            _label("to_lbl", 20, 150, "To:", 60, 40),
            _field("to", 90, 150, 290, 40),
            _button("send", 390, 150, 70, 40, "Send"),
            _input("subject", 20, 220, 440, 50, "Subject"),
        ],
        "transitions": [_tap("send", "sent", guard={"to": "bob@x.io", "subject": "Hi"})],
    },
    "sent": {"widgets": [_label("head", 40, 83, "Message sent", 0, 30)]},
}, "inbox", goal={"screen": "sent"})


def _email(a: Author):
    d = a.decide("click", "Compose button", "open a new message")
    a.step(d, a.match(d, "compose"))
    d = a.decide("input", "recipient field next to To:", "address the message", text="bob@x.io")
    a.step(d, a.match_label(d, "to_lbl"))
    d = a.decide("input", "Subject field", "give it a subject", text="Hi")
    a.step(d, a.match(d, "subject"))
    d = a.decide("click", "Send button", "send the message")
    a.step(d, a.match(d, "send"), complete=True)


SETTINGS_APP = _app("demo.settings", "Settings", {
    "home": {
        "widgets": [
            _label("head", 40, 83, "Settings", 0, 30),
            _button("display", 20, 160, 440, 60, "Display"),
            _button("bt", 20, 240, 440, 60, "Bluetooth"),
        ],
        "transitions": [_tap("display", "display"), _tap("bt", "bluetooth")],
    },
    "display": {"widgets": [_label("head", 40, 83, "Display", 0, 30), _button("bright", 20, 160, 440, 60, "Brightness")]},
    "bluetooth": {
        "widgets": [_label("head", 40, 83, "Bluetooth is off", 0, 30), _button("on", 20, 160, 440, 60, "Turn on")],
        "transitions": [_tap("on", "bt_on", replace=True)],
    },
    "bt_on": {"widgets": [_label("head", 40, 83, "Bluetooth is on", 0, 30)]},
}, "home", goal={"screen": "bt_on"})


def _wrong_widget(a: Author):
    d = a.decide("click", "Bluetooth entry", "open Bluetooth settings")
    a.act_and_fail(a.match(d, "display"), changed=True)
    a.cause("localization_error", "Display was opened instead of Bluetooth")
    a.step(d, a.match(d, "bt"))
    d = a.decide("click", "Turn on button", "switch Bluetooth on")
    a.step(d, a.match(d, "on"), complete=True)


ALARM_APP = _app("demo.clock", "Clock", {
    "alarms": {
        "widgets": [
            _label("head", 40, 83, "Alarms", 0, 30),
            _label("a1", 40, 160, "07:30 weekdays", 0, 30),
            _label("add_lbl", 40, 700, "Add alarm", 0, 40),
            # Transparent hit area: the recognizer cannot see it.
            {"id": "add", "kind": "hidden", "box": [150, 690, 120, 60]},
        ],
        "transitions": [_tap("add", "new_alarm")],
    },
    "new_alarm": {
        "widgets": [_label("time", 40, 120, "06:45", 0, 40), _button("save", 300, 700, 160, 56, "Save")],
        "transitions": [_tap("save", "alarms_saved", replace=True)],
    },
    "alarms_saved": {"widgets": [_label("head", 40, 83, "Alarms", 0, 30), _label("a2", 40, 160, "06:45 once", 0, 30)]},
}, "alarms", goal={"screen": "alarms_saved"})


def _alarm(a: Author):
    d = a.decide("click", "add button beside Add alarm", "create a new alarm")
    a.step(d, a.predict(d, "add_lbl", "right"))
    d = a.decide("click", "Save button", "store the alarm")
    a.step(d, a.match(d, "save"), complete=True)


WEATHER_APP = _app("demo.weather", "Weather", {
    "home": {
        "loading_frames": 2,
        "widgets": [
            _label("head", 40, 83, "Weather", 0, 30),
            _input("city", 20, 160, 440, 56, "City"),
            _button("go", 20, 240, 440, 56, "Search"),
        ],
        "transitions": [_tap("go", "result", guard={"city": "Paris"})],
    },
    "result": {"loading_frames": 3, "widgets": [_label("head", 40, 83, "Paris", 0, 30), _label("t", 40, 160, "18 C, cloudy", 0, 30)]},
}, "home", goal={"screen": "result"})


def _weather(a: Author):
    d = a.decide("input", "City field", "enter the city", text="Paris")
    a.step(d, a.match(d, "city"))
    d = a.decide("click", "Search button", "look up the forecast")
    a.step(d, a.match(d, "go"), complete=True)


SCROLL_APP = _app("demo.settings", "Settings", {
    "top": {
        "widgets": [
            _label("head", 40, 83, "Settings", 0, 30),
            _button("display", 20, 160, 440, 60, "Display"),
            _button("sound", 20, 240, 440, 60, "Sound"),
        ],
        "transitions": [{"on": {"scroll": "down"}, "to": "bottom", "replace": True}, _tap("display", "display")],
    },
    "bottom": {
        "widgets": [
            _button("storage", 20, 80, 440, 60, "Storage"),
            _button("about", 20, 160, 440, 60, "About phone"),
        ],
        "transitions": [{"on": {"scroll": "up"}, "to": "top", "replace": True}, _tap("about", "about")],
    },
    "display": {"widgets": [_label("head", 40, 83, "Display", 0, 30)]},
    "about": {"widgets": [_label("head", 40, 83, "About phone", 0, 30), _label("v", 40, 160, "Version 1.0", 0, 30)]},
}, "top", goal={"screen": "about"})


def _scroll(a: Author):
    d = a.decide("scroll", "screen", "reveal more entries", direction="down")
    a.step(d, LocatedDecision(d))
    d = a.decide("click", "About phone entry", "open device information")
    a.step(d, a.match(d, "about"))
    a.done()


SHOP_APP = _app("demo.shop", "Shop", {
    "product": {
        "widgets": [
            _label("head", 40, 83, "Blue mug", 0, 30),
            _label("cart", 300, 83, "Cart: 0", 0, 30),
            _button("add", 20, 600, 440, 56, "Add to cart"),
            _button("checkout", 20, 680, 440, 56, "Checkout"),
        ],
        "transitions": [
            _tap("add", set={"cart": "Cart: 1"}),
            _tap("checkout", "order", guard={"cart": "Cart: 1"}),
        ],
    },
    "order": {"widgets": [_label("head", 40, 83, "Order placed", 0, 30)]},
}, "product", goal={"screen": "order"})


def _shop(a: Author):
    d = a.decide("click", "Checkout button", "buy the mug")
    a.act_and_fail(a.match(d, "checkout"))
    a.cause("missing_preaction", "the cart is empty, the mug must be added first")
    d = a.decide("click", "Add to cart button", "put the mug in the cart")
    a.step(d, a.match(d, "add"))
    d = a.decide("click", "Checkout button", "buy the mug")
    a.step(d, a.match(d, "checkout"), complete=True)


def _wrong_input(a: Author):
    """Types into the wrong field, gets corrected; exercises input reversal."""
    d = a.decide("input", "Email field", "enter the account email", text="amy@demo.io")
    a.act_and_fail(a.match(d, "password"), changed=True)
    a.cause("localization_error", "the text went into the password field")
    a.step(d, a.match(d, "email"))
    d = a.decide("input", "Password field", "enter the password", text="pw123")
    a.step(d, a.match(d, "password"))
    d = a.decide("click", "Log in button", "submit the credentials")
    a.step(d, a.match(d, "login"), complete=True)


def _exhaust(a: Author):
    """Keeps pressing the disabled Checkout button until the budget runs out."""
    d = a.decide("click", "Checkout button", "buy the mug")
    a.act_and_fail(a.match(d, "checkout"))
    a.cause("wrong_logic", "checkout did nothing")
    d = a.decide("click", "Checkout button", "buy the mug")
    a.act_and_fail(a.match(d, "checkout"))
    a.cause("localization_error", "maybe another button")
    a.act_and_fail(a.match(d, "checkout"))


CRASH_LINES = "\n".join([
    "FATAL EXCEPTION: main",
    "Process: demo.notes, PID: 4242",
    "java.lang.IllegalStateException: export target missing",
    "\tat demo.notes.export.ExportTask.run(ExportTask.java:42)",
    "\tat android.os.Handler.handleCallback(Handler.java:938)",
])
FOREIGN_CRASH = "\n".join([
    "FATAL EXCEPTION: worker-3",
    "Process: com.other.sync, PID: 5150",
    "java.lang.NullPointerException: token",
    "\tat com.other.sync.Worker.run(Worker.java:7)",
])

CRASH_APP = _app("demo.notes", "Demo Notes", {
    "home": {
        "widgets": [
            _label("head", 40, 83, "My notes", 0, 30),
            _button("sync", 20, 160, 440, 56, "Sync now"),
            _button("export", 20, 240, 440, 56, "Export all"),
        ],
        "transitions": [_tap("sync", "synced", replace=True, log_emit=FOREIGN_CRASH)],
    },
    "synced": {
        "widgets": [
            _label("head", 40, 83, "Synced", 0, 30),
            _button("export", 20, 240, 440, 56, "Export all"),
        ],
    },
}, "home", crash_points=[{"screen": "synced", "event": {"tap": "export"}, "log_line": CRASH_LINES}])


def _crash(a: Author):
    d = a.decide("click", "Sync now button", "sync notes first")
    a.step(d, a.match(d, "sync"))
    d = a.decide("click", "Export all button", "export the notes")
    a.act_and_fail(a.match(d, "export"))
    a.cause("localization_error", "nothing happened")
    a.act_and_fail(a.match(d, "export"))
    a.cause("wrong_logic", "export does not respond")
    a.done()


def _s(name, description, **inputs):
    return ScenarioSpec(name, description, inputs)


FIXTURES = [
    Fixture("login_multi_field", "multi-field login", LOGIN_APP,
            _s("login", "Log in with the given email and password.", email="amy@demo.io", password="pw123"),
            _login,
            [("tap", "email"), ("input", "email", "amy@demo.io"), ("tap", "password"),
             ("input", "password", "pw123"), ("tap", "login")],
            expected_steps=3),
    Fixture("login_label_adjust", "multi-field login", LABEL_LOGIN_APP,
            _s("login", "Sign in as user amy with PIN 4321.", user="amy", pin="4321"),
            _label_login,
            [("tap", "user"), ("input", "user", "amy"), ("tap", "pin"), ("input", "pin", "4321"), ("tap", "go")],
            expected_steps=3, tags=("adjustment",)),
    Fixture("note_hidden_menu", "hidden-menu note creation", NOTES_MENU_APP,
            _s("create_note", "Create a note titled Groceries."),
            _notes_menu,
            [("tap", "menu"), ("tap", "new"), ("tap", "title"), ("input", "title", "Groceries"), ("tap", "save")],
            expected_steps=4),
    Fixture("note_plus_icon", "note creation", NOTES_PLUS_APP,
            _s("create_note", "Create a note that says meeting at 3pm."),
            _notes_plus,
            [("tap", "add"), ("tap", "body"), ("input", "body", "meeting at 3pm"), ("tap", "save")],
            expected_steps=3),
    Fixture("calc_add", "calculator keypress sequence", CALC_ADD_APP,
            _s("add", "Compute 12 + 7 and show the result."),
            _keys("12+7="),
            [("tap", "k1"), ("tap", "k2"), ("tap", "kadd"), ("tap", "k7"), ("tap", "keq")],
            expected_steps=5),
    Fixture("calc_mul", "calculator keypress sequence", CALC_MUL_APP,
            _s("multiply", "Compute 9 * 8 and show the result."),
            _keys("9*8="),
            [("tap", "k9"), ("tap", "kmul"), ("tap", "k8"), ("tap", "keq")],
            expected_steps=4),
    Fixture("email_compose", "compose and send email", EMAIL_APP,
            _s("send_email", "Send an email to bob@x.io with subject Hi."),
            _email,
            [("tap", "compose"), ("tap", "to"), ("input", "to", "bob@x.io"), ("tap", "subject"),
             ("input", "subject", "Hi"), ("tap", "send")],
            expected_steps=4, tags=("adjustment",)),
    Fixture("wrong_widget_corrected", "settings toggle", SETTINGS_APP,
            _s("bluetooth_on", "Turn Bluetooth on."),
            _wrong_widget,
            [("tap", "display"), ("back",), ("tap", "bt"), ("tap", "on")],
            expected_steps=2, expected_causes=("localization_error",), tags=("reversal",)),
    Fixture("alarm_virtual_widget", "alarm creation", ALARM_APP,
            _s("add_alarm", "Add a new alarm and save it."),
            _alarm,
            [("tap", "add"), ("tap", "save")],
            expected_steps=2, tags=("virtual",)),
    Fixture("weather_loading", "search with loading pages", WEATHER_APP,
            _s("forecast", "Look up the weather for Paris."),
            _weather,
            [("tap", "city"), ("input", "city", "Paris"), ("tap", "go")],
            expected_steps=2, tags=("loading",)),
    Fixture("settings_scroll", "scroll to hidden entry", SCROLL_APP,
            _s("about", "Open the About phone page."),
            _scroll,
            [("scroll", "down"), ("tap", "about")],
            expected_steps=3, tags=("scroll", "done")),
    Fixture("shop_missing_preaction", "purchase flow", SHOP_APP,
            _s("buy", "Buy the blue mug."),
            _shop,
            [("tap", "checkout"), ("tap", "add"), ("tap", "checkout")],
            expected_steps=2, expected_causes=("missing_preaction",)),
    Fixture("login_wrong_field", "multi-field login", LOGIN_APP,
            _s("login", "Log in with the given email and password.", email="amy@demo.io", password="pw123"),
            _wrong_input,
            [("tap", "password"), ("input", "password", "amy@demo.io"), ("clear", "password"), ("back",),
             ("tap", "email"), ("input", "email", "amy@demo.io"), ("tap", "password"),
             ("input", "password", "pw123"), ("tap", "login")],
            expected_steps=3, expected_causes=("localization_error",), tags=("reversal",)),
]

EXHAUSTION = Fixture("shop_exhaustion", "purchase flow", SHOP_APP, _s("buy", "Buy the blue mug."), _exhaust,
                     [("tap", "checkout"), ("tap", "checkout"), ("tap", "checkout")],
                     expected_case="c4", expected_steps=1,
                     expected_causes=("wrong_logic", "localization_error"))

CRASH = Fixture("notes_export_crash", "crash during export", CRASH_APP, _s("export", "Export all notes."), _crash,
                [("tap", "sync"), ("tap", "export"), ("tap", "export")],
                expected_case="c1", expected_steps=2, expected_causes=("localization_error", "wrong_logic"),
                expected_bugs=1, expected_bug_op=1)

ALL = {f.name: f for f in FIXTURES + [EXHAUSTION, CRASH]}


def get(name: str) -> Fixture:
    return ALL[name]
