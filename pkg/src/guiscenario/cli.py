"""Command-line entry points: run, perceive, simulate, report, replay."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import yaml

from .device.sim import SimAppSpec, SimBackend
from .errors import ConfigError, EngineError, ScenarioError, SimSpecError
from .memory import ScenarioSpec
from .metrics import report
from .orchestrator import EngineConfig, RunOutcome, make_ocr, run_scenario
from .perception.config import PerceptionConfig
from .perception.pipeline import perceive
from .raster import RasterImage
from .recorder import read_session_log, replay

EXIT_CODES = {"c1": 0, "c2": 10, "c3": 20, "c4": 30}
EXIT_ENGINE = 1
EXIT_USAGE = 2

log = logging.getLogger("guiscenario")

# Config-file keys that belong to the CLI rather than the engine.
CLI_KEYS = ("scenarios", "out", "parallel", "seed")


class UsageError(Exception):
    pass


def _read_doc(path) -> dict:
    try:
        text = Path(path).read_text()
        data = yaml.safe_load(text) if str(path).endswith((".yaml", ".yml")) else json.loads(text)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return data


def _load_config(args) -> tuple[EngineConfig, dict]:
    data = _read_doc(args.config) if getattr(args, "config", None) else {}
    cli = {k: data.pop(k) for k in CLI_KEYS if k in data}
    overrides = {
        "provider": getattr(args, "provider", None),
        "backend": getattr(args, "backend", None),
        "max_steps": getattr(args, "max_steps", None),
        "max_corrections": getattr(args, "max_corrections", None),
        "poll_ms": getattr(args, "poll_ms", None),
        "max_wait_ms": getattr(args, "max_wait_ms", None),
        "model": getattr(args, "model", None),
        "ocr": getattr(args, "ocr", None),
        "templates_dir": getattr(args, "templates", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return EngineConfig.from_dict(data), cli


def _scenarios(args, cli) -> list[ScenarioSpec]:
    catalog = {}
    for item in cli.get("scenarios") or []:
        s = ScenarioSpec.from_dict(item)
        catalog[s.name] = s
    if args.scenarios_file:
        for item in _read_doc(args.scenarios_file).get("scenarios", []):
            s = ScenarioSpec.from_dict(item)
            catalog[s.name] = s
    names = args.scenario or []
    if not names:
        raise UsageError("no scenario given (use --scenario NAME)")
    out = []
    for name in names:
        if args.description:
            out.append(ScenarioSpec(name, args.description))
        elif name in catalog:
            out.append(catalog[name])
        else:
            raise UsageError(f"scenario {name!r} is not defined in the config or scenario file")
    return out


def cmd_run(args) -> int:
    cfg, cli = _load_config(args)
    scenarios = _scenarios(args, cli)
    if not cfg.provider or not cfg.backend:
        raise UsageError("both a provider and a backend selector are required")
    out_dir = Path(args.out or cli.get("out") or "runs")
    parallel = args.parallel or int(cli.get("parallel", 1))

    def one(scenario):
        return run_scenario(cfg, scenario, out_dir=out_dir)

    if parallel > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            outcomes = list(pool.map(one, scenarios))
    else:
        outcomes = [one(s) for s in scenarios]
    for o in outcomes:
        print(f"{o.scenario}: case={o.case} termination={o.termination} steps={o.steps} "
              f"tokens={o.ledger.total} bugs={len(o.bugs)} dir={o.session_dir}")
    return max(EXIT_CODES[o.case] for o in outcomes)


def cmd_perceive(args) -> int:
    try:
        img = RasterImage.load(args.image)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read image {args.image}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    pcfg = PerceptionConfig()
    ocr = "fixture"
    if args.config:
        data = _read_doc(args.config)
        pcfg = PerceptionConfig.from_dict(data.get("perception") or {})
        ocr = data.get("ocr", ocr)
    result = perceive(img, make_ocr(args.ocr or ocr), pcfg)
    out = Path(args.out) if args.out else Path(args.image).parent
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.image).stem
    (out / f"{stem}.widgets.json").write_text(json.dumps(result.document(), indent=2))
    result.annotated.save(out / f"{stem}.annotated.png")
    print(f"{len(result.widgets)} widgets")
    if args.verbose:
        print(result.widgets.describe())
    return 0


def _sim_event(backend: SimBackend, event: str):
    kind, _, arg = event.partition(":")
    if kind == "tap":
        if arg.startswith("@"):
            backend.tap(backend.widget_box(arg[1:]).center_px())
        else:
            x, y = (int(v) for v in arg.split(","))
            backend.tap((x, y))
    elif kind == "text":
        backend.input_text(arg)
    elif kind == "back":
        backend.back()
    elif kind == "scroll":
        backend.scroll(arg)
    else:
        raise UsageError(f"unknown event {event!r} (tap:x,y | tap:@widget | text:... | back | scroll:dir)")


def cmd_simulate(args) -> int:
    spec = SimAppSpec.load(args.spec)
    backend = SimBackend(spec)
    for ev in args.events:
        _sim_event(backend, ev)
    rendered = backend.render()
    if args.render:
        rendered.image.save(args.render)
    print(json.dumps({
        "screen": backend.screen_id,
        "events": backend.events,
        "logs": [line for _, line in backend.logs],
        "widgets": [{"id": t.id_hint, "kind": t.kind, "box": t.box.as_list(), "text": t.text}
                    for t in rendered.truth_in_reading_order()],
    }, indent=2))
    return 0


def session_dirs(paths) -> list[Path]:
    found = []
    for p in map(Path, paths):
        if (p / "outcome.json").is_file():
            found.append(p)
        elif p.is_dir():
            found.extend(sorted(d for d in p.iterdir() if (d / "outcome.json").is_file()))
    return found


def cmd_report(args) -> int:
    dirs = session_dirs(args.paths)
    if not dirs:
        print("error: no session directories found", file=sys.stderr)
        return EXIT_USAGE
    outcomes = [RunOutcome.from_dict(json.loads((d / "outcome.json").read_text())) for d in dirs]
    rep = report(outcomes, args.group)
    print(rep.to_json() if args.format == "json" else rep.to_text(), end="" if args.format == "text" else "\n")
    return 0


def cmd_replay(args) -> int:
    d = Path(args.session)
    if not (d / "log.jsonl").is_file():
        print(f"error: {d} has no log.jsonl", file=sys.stderr)
        return EXIT_USAGE
    ops, ledger = replay(read_session_log(d / "log.jsonl"))
    for r in ops:
        print(f"{r.index:3d} step {r.step} [{r.role}] {r.summary()}")
    print("ledger " + " ".join(f"{k}={v}" for k, v in ledger.to_dict().items()))
    outcome_path = d / "outcome.json"
    if outcome_path.is_file():
        saved = RunOutcome.from_dict(json.loads(outcome_path.read_text()))
        if saved.ledger != ledger or [r.to_dict() for r in saved.ops] != [r.to_dict() for r in ops]:
            print("replay does not match the saved outcome", file=sys.stderr)
            return EXIT_ENGINE
        print("replay matches the saved outcome")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="guiscenario", description="Scenario-driven GUI test generation.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one or more scenarios")
    r.add_argument("--config")
    r.add_argument("--scenario", action="append", help="scenario name; repeatable")
    r.add_argument("--description", help="define the scenario inline instead of looking it up")
    r.add_argument("--scenarios-file")
    r.add_argument("--provider", help="scripted:<script> or http:<endpoint>")
    r.add_argument("--backend", help="sim:<spec> or adb:<app_id>[@serial]")
    r.add_argument("--out")
    r.add_argument("--parallel", type=int, default=0)
    r.add_argument("--seed", type=int, help="reserved; runs are deterministic given script and spec")
    r.add_argument("--max-steps", type=int)
    r.add_argument("--max-corrections", type=int)
    r.add_argument("--poll-ms", type=int)
    r.add_argument("--max-wait-ms", type=int)
    r.add_argument("--model")
    r.add_argument("--ocr", help="fixture or command:<cmd with {image}>")
    r.add_argument("--templates", help="directory overriding the packaged prompt templates")
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("perceive", help="recognize widgets in a screenshot")
    q.add_argument("image")
    q.add_argument("--out")
    q.add_argument("--config")
    q.add_argument("--ocr")
    q.set_defaults(func=cmd_perceive)

    s = sub.add_parser("simulate", help="drive a simulated app by hand")
    s.add_argument("spec")
    s.add_argument("events", nargs="*", help="tap:x,y | tap:@widget | text:... | back | scroll:dir")
    s.add_argument("--render", help="write the final screen as PNG")
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("report", help="tabulate finished sessions")
    t.add_argument("paths", nargs="*")
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.add_argument("--group", choices=("scenario", "case", "session"), default="scenario")
    t.set_defaults(func=cmd_report)

    y = sub.add_parser("replay", help="rebuild op log and ledger from a session log")
    y.add_argument("session")
    y.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, ScenarioError, SimSpecError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
