"""Write every fixture as files the CLI can run.

    python scripts/build_fixtures.py fixtures_out
    guiscenario run --config fixtures_out/login_multi_field/config.json --scenario login
"""

import argparse
import json
from pathlib import Path

from guiscenario import fixtures


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?", default="fixtures_out")
    args = ap.parse_args()
    root = Path(args.out)
    for name, fx in fixtures.ALL.items():
        d = root / name
        d.mkdir(parents=True, exist_ok=True)
        (d / "app.json").write_text(json.dumps(fx.app, indent=2))
        (d / "script.json").write_text(json.dumps(fx.script(), indent=2))
        config = {
            "provider": f"scripted:{d / 'script.json'}",
            "backend": f"sim:{d / 'app.json'}",
            "scenarios": [fx.scenario.to_dict()],
            "out": str(d / "runs"),
        }
        (d / "config.json").write_text(json.dumps(config, indent=2))
        (d / "expected.json").write_text(json.dumps({
            "case": fx.expected_case,
            "steps": fx.expected_steps,
            "events": fx.expected_events,
        }, indent=2))
        print(f"{name}: {d}")


if __name__ == "__main__":
    main()
