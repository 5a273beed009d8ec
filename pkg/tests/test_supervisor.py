import logging

import pytest

from guiscenario import fixtures
from guiscenario.device import Operation, SimBackend, execute
from guiscenario.llm import Gateway, ScriptEntry, ScriptedProvider, Stage, Usage
from guiscenario.llm.parsing import render_verdict
from guiscenario.memory import GuiState, ScenarioSpec, init_session
from guiscenario.raster import BoundingBox, RasterImage
from guiscenario.supervisor import (
    VerificationResult,
    WaitConfig,
    detect_actual_change,
    reverse_operation,
    undo,
    verify_completion,
    verify_transition,
)
from guiscenario.supervisor import wait_until_stable


def mem():
    return init_session(ScenarioSpec("s", "do a thing"), "dev", "app")


def gateway(stage, *verdicts, prompt=None):
    p = ScriptedProvider([ScriptEntry(Stage(stage), render_verdict(v), Usage(1, 1), prompt) for v in verdicts])
    return Gateway(p), p


def test_wait_polls_until_not_loading():
    b = SimBackend(fixtures.get("weather_loading").spec())
    t0 = b.clock.now()
    gw, p = gateway("loading_check", "yes", "yes", "no")
    seen = []
    state = wait_until_stable(b, gw, mem(), WaitConfig(poll_ms=500), on_verdict=seen.append)
    assert not state.timed_out and state.meta["polls"] == 2
    assert [v.verdict for v in seen] == ["yes", "yes", "no"]
    assert b.clock.now() - t0 >= 1.0 and p.remaining == 0


def test_wait_times_out_with_last_frame():
    b = SimBackend(fixtures.get("weather_loading").spec())
    gw, _ = gateway("loading_check", "yes", "yes", "yes")
    state = wait_until_stable(b, gw, mem(), WaitConfig(poll_ms=500, max_wait_ms=1000))
    assert state.timed_out and state.meta["polls"] == 2


def test_wait_config_rejects_non_positive():
    with pytest.raises(ValueError):
        WaitConfig(poll_ms=0)


A = GuiState(RasterImage.blank(10, 10))
B = GuiState(RasterImage.blank(10, 10, (0, 0, 0)))


def test_transition_gets_identical_image_hint_but_model_decides():
    gw, p = gateway("transition_check", "yes")
    res = verify_transition(mem(), Operation("back"), A, A, gw, intent="leave")
    assert res.yes and res.called_model
    assert "pixel-identical" in p.requests[0].text and "leave" in p.requests[0].text
    assert len(p.requests[0].images) == 2


def test_change_short_circuits_on_identical_images():
    gw, p = gateway("transition_check", "yes", prompt="change_check")
    res = detect_actual_change(mem(), A, A, gw)
    assert (res.verdict, res.called_model) == ("no", False) and not p.requests
    assert detect_actual_change(mem(), A, B, gw, Operation("back")).yes
    assert p.requests[0].prompt == "change_check"


def test_completion_check():
    gw, _ = gateway("completion_check", "no")
    assert verify_completion(mem(), A, B, gw).to_dict() == {
        "check": "completion", "verdict": "no", "reason": "", "called_model": True}


def test_verification_result_validates():
    with pytest.raises(ValueError):
        VerificationResult("vibes", "yes")
    with pytest.raises(ValueError):
        VerificationResult("change", "maybe")


@pytest.mark.parametrize("op,rev", [
    (Operation("click", tap_point=(1, 1)), Operation("back")),
    (Operation("input", tap_point=(1, 1), text="x"), Operation("back")),
    (Operation("scroll", direction="up", region=BoundingBox(0, 0, 5, 5)),
     Operation("scroll", direction="down", region=BoundingBox(0, 0, 5, 5))),
    (Operation("scroll", direction="left"), Operation("scroll", direction="right")),
])
def test_reverse_operation(op, rev):
    assert reverse_operation(op) == rev


@pytest.mark.parametrize("kind", ["back", "done"])
def test_irreversible_ops_warn(kind, caplog):
    with caplog.at_level(logging.WARNING):
        assert reverse_operation(Operation(kind)) is None
    assert "cannot be reversed" in caplog.text


def test_undo_input_clears_before_back():
    b = SimBackend(fixtures.get("login_multi_field").spec())
    op = Operation("input", tap_point=b.widget_box("email").center_px(), text="typo")
    execute(op, b)
    rev, parts = undo(op, b, execute)
    assert rev == Operation("back") and parts[0] == {"action": "clear_text"}
    assert [e["kind"] for e in b.events] == ["tap", "input", "clear", "back"]
    assert b.values[("login", "email")] == ""
    assert undo(Operation("done"), b, execute) == (None, [])
