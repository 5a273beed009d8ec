"""Run the whole fixture catalog and print the outcome table.

    python scripts/run_fixture_suite.py [--out runs] [--format text|json]
"""

import argparse
import time

from guiscenario import fixtures
from guiscenario.device.sim import SimBackend
from guiscenario.metrics import report
from guiscenario.orchestrator import EngineConfig, run_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    args = ap.parse_args()
    outcomes = []
    for name, fx in fixtures.ALL.items():
        t0 = time.perf_counter()
        backend = SimBackend(fx.spec())
        provider = fx.build().provider()
        out = run_scenario(EngineConfig(), fx.scenario, provider=provider, backend=backend, out_dir=args.out)
        out.scenario = name
        events_ok = fixtures.events_of(backend) == fx.expected_events
        print(f"{name:26s} case={out.case} expected={fx.expected_case} events_ok={events_ok} "
              f"steps={out.steps} tokens={out.ledger.total} bugs={len(out.bugs)} "
              f"{time.perf_counter() - t0:.2f}s")
        outcomes.append(out)
    rep = report(outcomes)
    print()
    print(rep.to_json() if args.format == "json" else rep.to_text())


if __name__ == "__main__":
    main()
