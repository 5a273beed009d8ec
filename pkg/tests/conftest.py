import time
from dataclasses import dataclass

import pytest

from guiscenario import fixtures
from guiscenario.device.sim import SimBackend
from guiscenario.llm.providers import ScriptedProvider
from guiscenario.orchestrator import EngineConfig, RunOutcome, run_scenario
from guiscenario.recorder import read_session_log


@dataclass
class FixtureRun:
    fixture: fixtures.Fixture
    outcome: RunOutcome
    backend: SimBackend
    provider: ScriptedProvider
    records: list
    seconds: float

    @property
    def events(self):
        return fixtures.events_of(self.backend)


def run_fixture(fx, out_dir=None, cfg=None) -> FixtureRun:
    t0 = time.perf_counter()
    backend = SimBackend(fx.spec())
    provider = fx.build().provider()
    outcome = run_scenario(cfg or EngineConfig(), fx.scenario, provider=provider, backend=backend, out_dir=out_dir)
    seconds = time.perf_counter() - t0
    records = read_session_log(f"{outcome.session_dir}/log.jsonl") if out_dir else []
    return FixtureRun(fx, outcome, backend, provider, records, seconds)


@pytest.fixture(scope="session")
def catalog_runs(tmp_path_factory):
    """Every catalog fixture run once, with session directories on disk."""
    out = tmp_path_factory.mktemp("runs")
    return {name: run_fixture(fx, out) for name, fx in fixtures.ALL.items()}
