import pytest
from hypothesis import given
from hypothesis import strategies as st

from guiscenario import fixtures
from guiscenario.decider import (
    CorrectionBudget,
    FailureEvidence,
    LocatedDecision,
    adjustment_region,
    decide_logical,
    locate,
    needs_localization,
    self_correct,
    virtual_box,
)
from guiscenario.device.sim import SimBackend
from guiscenario.errors import StepError
from guiscenario.llm import AbstractDecision, CorrectionCause, Gateway, ScriptEntry, ScriptedProvider, Stage, Usage
from guiscenario.llm.parsing import PLACEMENTS, render_cause, render_decision, render_verdict
from guiscenario.memory import GuiState, ScenarioSpec, init_session
from guiscenario.perception import FixtureOcr, perceive
from guiscenario.raster import BoundingBox


def session(name, screen=None):
    fx = fixtures.get(name)
    backend = SimBackend(fx.spec())
    if screen:
        backend.screen_id = screen
    img = backend.render().image
    mem = init_session(fx.scenario, "dev", "app")
    mem.push_state(GuiState(img, perception=perceive(img, FixtureOcr())))
    return mem, backend


def gateway(*entries):
    provider = ScriptedProvider([ScriptEntry(Stage(s), text, Usage(1, 1), prompt) for s, text, prompt in entries])
    return Gateway(provider), provider


def wl(text, prompt="widget_localization"):
    return ("widget_localization", text, prompt)


# geometry

@given(st.builds(BoundingBox, st.integers(-50, 500), st.integers(-50, 900), st.integers(1, 300), st.integers(1, 300)),
       st.sampled_from(PLACEMENTS))
def test_virtual_box_is_in_bounds(anchor, placement):
    box = virtual_box(anchor, placement, 480, 800)
    if box is not None:
        assert box.in_bounds(480, 800)
        assert box.w <= anchor.w and box.h <= anchor.h


def test_virtual_box_placements():
    a = BoundingBox(100, 100, 40, 20)
    assert virtual_box(a, "right", 480, 800) == BoundingBox(140, 100, 40, 20)
    assert virtual_box(a, "left", 480, 800) == BoundingBox(60, 100, 40, 20)
    assert virtual_box(a, "above", 480, 800) == BoundingBox(100, 80, 40, 20)
    assert virtual_box(a, "below", 480, 800) == BoundingBox(100, 120, 40, 20)
    assert virtual_box(a, "inside", 480, 800) == BoundingBox(110, 105, 20, 10)
    assert virtual_box(BoundingBox(460, 0, 20, 20), "right", 480, 800) is None
    with pytest.raises(ValueError):
        virtual_box(a, "behind", 480, 800)


def test_adjustment_region():
    label = BoundingBox(20, 100, 40, 20)
    others = [BoundingBox(300, 95, 50, 30), BoundingBox(0, 300, 480, 40), BoundingBox(10, 100, 5, 5)]
    assert adjustment_region(label, others, 480) == BoundingBox(60, 100, 240, 20)
    assert adjustment_region(label, [], 480) == BoundingBox(60, 100, 420, 20)
    assert adjustment_region(BoundingBox(440, 0, 40, 10), [], 480) is None


def test_needs_localization():
    assert not needs_localization(AbstractDecision("scroll", widget_description="Screen", scroll_direction="up"))
    assert needs_localization(AbstractDecision("scroll", widget_description="the list", scroll_direction="up"))
    assert not needs_localization(AbstractDecision("back"))
    assert needs_localization(AbstractDecision("click", widget_description="OK"))


def test_located_decision_rejects_tap_outside_target():
    with pytest.raises(ValueError):
        LocatedDecision(AbstractDecision("click"), 1, BoundingBox(0, 0, 10, 10), (20, 20), "match")


# decision and localization flows

def test_decide_logical_sends_one_raw_image():
    mem, _ = session("login_multi_field")
    dec = AbstractDecision("click", "submit", "Log in button")
    gw, p = gateway(("logical_decision", render_decision(dec), None))
    assert decide_logical(mem, gw) == dec
    req = p.requests[0]
    assert len(req.images) == 1 and req.images[0] == mem.short_term.current_state.image
    assert "Log in with the given email and password." in req.text


def test_decide_logical_needs_a_state():
    mem = init_session(ScenarioSpec("x", "y"), "d", "a")
    with pytest.raises(StepError):
        decide_logical(mem, gateway()[0])


def test_locate_match_on_bordered_input_skips_adjustment():
    mem, _ = session("login_multi_field")
    per = mem.short_term.current_state.perception
    dec = AbstractDecision("input", "type", "Email field", "a@b")
    gw, p = gateway(wl("ID: 2"))
    loc = locate(dec, per, gw, mem)
    assert (loc.source, loc.widget_id, loc.target_box) == ("match", 2, per.widgets.get(2).box)
    assert [len(r.images) for r in p.requests] == [2]
    assert p.requests[0].images[1] == per.annotated


def test_locate_adjusts_input_on_a_label():
    mem, backend = session("login_label_adjust")
    per = mem.short_term.current_state.perception
    label = next(w for w in per.widgets if w.text == "User:")
    dec = AbstractDecision("input", "type user", "field next to User:", "amy")
    gw, _ = gateway(wl(f"ID: {label.id}"),
                    wl(render_verdict("yes", "only a label"), "location_adjustment"))
    loc = locate(dec, per, gw, mem)
    assert loc.source == "adjusted" and loc.target_box.x == label.box.x2
    assert backend.hit_test(*loc.tap_point) == "user"


def test_locate_label_adjustment_declined():
    mem, _ = session("login_label_adjust")
    per = mem.short_term.current_state.perception
    label = next(w for w in per.widgets if w.text == "User:")
    dec = AbstractDecision("input", "", "User", "amy")
    gw, _ = gateway(wl(f"ID: {label.id}"), wl("VERDICT: no", "location_adjustment"))
    assert locate(dec, per, gw, mem).source == "match"


def test_locate_predicts_virtual_widget_on_not_found():
    mem, backend = session("alarm_virtual_widget")
    per = mem.short_term.current_state.perception
    anchor = next(w for w in per.widgets if w.text == "Add alarm")
    dec = AbstractDecision("click", "add", "add button")
    gw, _ = gateway(wl("NOT_FOUND"), wl(f"ANCHOR: {anchor.id}\nPLACEMENT: right", "widget_prediction"))
    loc = locate(dec, per, gw, mem)
    assert loc.source == "virtual" and loc.widget_id == anchor.id
    assert backend.hit_test(*loc.tap_point) == "add"


def test_prediction_is_clipped_to_the_screen():
    mem, _ = session("wrong_widget_corrected")
    per = mem.short_term.current_state.perception
    wide = per.widgets.get(2)
    gw, _ = gateway(wl("NOT_FOUND"), wl(f"ANCHOR: {wide.id}\nPLACEMENT: right", "widget_prediction"))
    loc = locate(AbstractDecision("click", "", "x"), per, gw, mem)
    assert loc.target_box == BoundingBox(wide.box.x2, wide.box.y, 480 - wide.box.x2, wide.box.h)


def test_scroll_on_screen_needs_no_localization():
    mem, _ = session("settings_scroll")
    gw, p = gateway()
    loc = locate(AbstractDecision("scroll", "", "screen", None, "down"), mem.short_term.current_state.perception,
                 gw, mem)
    assert loc.source == "none" and loc.operation().direction == "down" and not p.requests


# self-correction

def _failure(dec):
    return FailureEvidence(dec, "click at (1, 1)", "wrong page", True, True)


def test_localization_error_replays_localization_only():
    mem, _ = session("wrong_widget_corrected")
    per = mem.short_term.current_state.perception
    dec = AbstractDecision("click", "bt", "Bluetooth entry")
    gw, p = gateway(("self_correction", render_cause("localization_error", "opened Display"), None), wl("ID: 3"))
    cause, new = self_correct(mem, _failure(dec), gw, per)
    assert cause == CorrectionCause("localization_error", "opened Display")
    assert isinstance(new, LocatedDecision) and new.widget_id == 3 and new.abstract == dec
    assert "Pick a different widget" in p.requests[1].text


@pytest.mark.parametrize("cause", ["missing_preaction", "wrong_logic"])
def test_other_causes_replay_the_decision(cause):
    mem, _ = session("shop_missing_preaction")
    new_dec = AbstractDecision("click", "add first", "Add to cart button")
    gw, p = gateway(("self_correction", render_cause(cause, "cart empty"), None),
                    ("logical_decision", render_decision(new_dec), None))
    got_cause, new = self_correct(mem, _failure(AbstractDecision("click", "", "Checkout")), gw,
                                  mem.short_term.current_state.perception)
    assert got_cause.cause == cause and new == new_dec
    assert "did not produce the expected page change" in p.requests[1].text


def test_correction_budget():
    b = CorrectionBudget(2)
    b.spend(CorrectionCause("wrong_logic"))
    b.spend(CorrectionCause("localization_error"))
    assert b.exhausted and b.causes == ["wrong_logic", "localization_error"]
    with pytest.raises(StepError):
        b.spend(CorrectionCause("wrong_logic"))


def test_failure_evidence_text():
    dec = AbstractDecision("click", "go", "Go")
    assert "undone" in _failure(dec).text()
    assert "did not change" in FailureEvidence(dec, "click", "", False, False).text()
