import json
import os

import pytest

from guiscenario import fixtures
from guiscenario.device import SimAppSpec, SimBackend
from guiscenario.device.adb import AdbBackend
from guiscenario.errors import ConfigError
from guiscenario.llm import ScriptedProvider
from guiscenario.memory import ScenarioSpec
from guiscenario.orchestrator import (
    AccuracyCounts,
    EngineConfig,
    RunOutcome,
    classify_outcome,
    make_backend,
    make_ocr,
    run_scenario,
)
from guiscenario.perception import CommandOcr, FixtureOcr
from guiscenario.recorder import TokenLedger


@pytest.mark.parametrize("termination,covered,case", [
    ("normal", True, "c1"), ("aborted", True, "c2"), ("budget", True, "c2"),
    ("normal", False, "c3"), ("aborted", False, "c4"), ("budget", False, "c4"),
])
def test_classify_outcome(termination, covered, case):
    assert classify_outcome(termination, covered) == case


def test_classify_rejects_unknown_termination():
    with pytest.raises(ValueError):
        classify_outcome("crashed", True)


def test_engine_config_validation_and_round_trip(tmp_path):
    cfg = EngineConfig(max_steps=5, perception={"text_gap_factor": 1.0})
    assert EngineConfig.from_dict(cfg.to_dict()) == cfg
    for bad in ({"max_steps": 0}, {"poll_ms": -1}, {"llm_timeout": 0}, {"action_types": ["click"]},
                {"action_types": ["click", "done", "swipe"]}, {"colour": "red"}):
        with pytest.raises(ConfigError):
            EngineConfig.from_dict(bad)
    (tmp_path / "c.yaml").write_text("max_steps: 7\nocr: fixture\n")
    assert EngineConfig.load(tmp_path / "c.yaml").max_steps == 7
    with pytest.raises(ConfigError):
        EngineConfig.load(tmp_path / "missing.json")


def test_run_outcome_invariants_and_round_trip():
    with pytest.raises(ValueError):
        RunOutcome("c1", 1, [], TokenLedger(), [], "aborted")
    with pytest.raises(ValueError):
        RunOutcome("c4", 1, [], TokenLedger(), [], "normal")
    o = RunOutcome("c2", 3, [], TokenLedger().charge("loading_check", 9), [], "budget", scenario="s",
                   decisions=AccuracyCounts(3, 2, 2))
    assert RunOutcome.from_dict(json.loads(json.dumps(o.to_dict()))).to_dict() == o.to_dict()


def test_accuracy_counts():
    c = AccuracyCounts()
    for initially, finally_ in ((True, True), (False, True), (False, False)):
        c.add(initially, finally_)
    assert c.to_dict() == {"N": 3, "n1": 1, "nf": 2}


def run(fx, provider, cfg=None, backend=None, out_dir=None):
    backend = backend or SimBackend(fx.spec())
    return run_scenario(cfg or EngineConfig(), fx.scenario, provider=provider, backend=backend,
                        out_dir=out_dir), backend


def test_exhausted_script_without_goal_is_c4():
    fx = fixtures.get("login_multi_field")
    entries = fx.build().entries
    outcome, _ = run(fx, ScriptedProvider(entries[:5]))
    assert outcome.case == "c4" and outcome.termination == "aborted"
    assert "ScriptExhausted" in outcome.reason


def test_exhausted_script_after_goal_is_c2():
    fx = fixtures.get("calc_add")
    entries = fx.build().entries
    outcome, backend = run(fx, ScriptedProvider(entries[:-1]))
    assert backend.goal_reached(fx.scenario.name)
    assert (outcome.case, outcome.termination, outcome.covered) == ("c2", "aborted", True)


def test_device_disconnect_aborts_the_run():
    fx = fixtures.get("login_multi_field")
    backend = SimBackend(fx.spec())
    backend.connected = False
    outcome, _ = run(fx, fx.build().provider(), backend=backend)
    assert outcome.case == "c4" and "DeviceError" in outcome.reason and outcome.bugs == []


def test_step_budget():
    fx = fixtures.get("login_multi_field")
    outcome, _ = run(fx, fx.build().provider(), EngineConfig(max_steps=1))
    assert (outcome.termination, outcome.steps, outcome.case) == ("budget", 1, "c4")


NO_GOAL_APP = fixtures._app("demo.plain", "Plain", {
    "home": {"widgets": [fixtures._button("go", 40, 200, 400, 56, "Open")], "transitions": [fixtures._tap("go", "page")]},
    "page": {"widgets": [fixtures._label("t", 40, 90, "Opened", 0, 30)]},
}, "home")


def test_done_decision_covers_when_no_goal_is_declared():
    spec = SimAppSpec.from_dict(NO_GOAL_APP)
    a = fixtures.Author(spec)
    dec = a.decide("click", "Open button", "open the page")
    a.step(dec, a.match(dec, "go"))
    a.done()
    scenario = ScenarioSpec("open", "Open the page.")
    backend = SimBackend(spec)
    outcome = run_scenario(EngineConfig(), scenario, provider=a.provider(), backend=backend)
    assert backend.goal_reached("open") is None
    assert (outcome.case, outcome.steps, outcome.covered) == ("c1", 2, True)
    assert [r.op.kind.value for r in outcome.ops] == ["click", "done"]


def test_outputs_on_disk(catalog_runs):
    run_ = catalog_runs["login_multi_field"]
    d = run_.outcome.session_dir
    saved = json.loads(open(f"{d}/outcome.json").read())
    assert saved == run_.outcome.to_dict()
    assert json.loads(open(f"{d}/bugs.json").read()) == []
    shots = sorted(os.listdir(f"{d}/screenshots"))
    assert shots[0] == "000.png" and "000_annotated.png" in shots
    kinds = [r["kind"] for r in run_.records]
    assert kinds[0] == "session_start" and kinds[-1] == "session_end"


def test_ledger_matches_scripted_usage(catalog_runs):
    for run_ in catalog_runs.values():
        used = sum(e.usage.total for e in run_.fixture.build().entries)
        assert run_.outcome.ledger.total == used, run_.fixture.name


def test_selectors(tmp_path):
    p = tmp_path / "app.json"
    p.write_text(json.dumps(NO_GOAL_APP))
    assert isinstance(make_backend(f"sim:{p}"), SimBackend)
    adb = make_backend("adb:demo.app@emu-1")
    assert isinstance(adb, AdbBackend) and adb.serial == "emu-1"
    assert isinstance(make_ocr("fixture"), FixtureOcr)
    assert isinstance(make_ocr("command:tesseract {image} - tsv"), CommandOcr)
    for bad in ("sim:", "usb:x"):
        with pytest.raises(ConfigError):
            make_backend(bad)
    with pytest.raises(ConfigError):
        make_ocr("magic")
