"""Acceptance gate: one test per criterion, each reporting a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed at the end of the session.
"""

import json
import random
import re
import time
from fractions import Fraction

import pytest

import fuzz
from conftest import run_fixture
from guiscenario import fixtures
from guiscenario.device.operations import Operation
from guiscenario.device.sim import SimBackend
from guiscenario.llm.messages import STAGES, Usage
from guiscenario.metrics import OutcomeCounts, accuracy, coverage_success, improvement
from guiscenario.perception import FixtureOcr, PerceptionConfig, extract_text_fragments, merge_text_fragments, perceive
from guiscenario.recorder import TokenLedger
from guiscenario.supervisor import reverse_operation

RESULTS = {}


def report(criterion, ok, detail):
    RESULTS[criterion] = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    print(RESULTS[criterion])


def half_up(fr: Fraction) -> str:
    """Independent 2-decimal rounding on exact rationals."""
    cents = fr * 100
    q = (cents.numerator * 2 + cents.denominator) // (2 * cents.denominator)
    return f"{q // 100}.{q % 100:02d}"


def pct(n, N):
    return half_up(Fraction(100 * n, N))


# 1. Metric reproduction


PUBLISHED_CELLS = [
    ("accuracy 38/39", lambda: accuracy(38, 39), "97.44"),
    ("accuracy 392/408", lambda: accuracy(392, 408), "96.08"),
    ("accuracy 396/408", lambda: accuracy(396, 408), "97.06"),
    ("improvement 97.44 -> 100.00", lambda: improvement("97.44", "100.00"), "2.63"),
    ("accuracy 258/312", lambda: accuracy(258, 312), "82.69"),
    ("accuracy 305/312", lambda: accuracy(305, 312), "97.76"),
    ("improvement over decision sums", lambda: improvement(accuracy(392, 408), accuracy(396, 408)), "1.02"),
    ("improvement over localization sums", lambda: improvement(accuracy(258, 312), accuracy(305, 312)), "18.22"),
    ("coverage (84,2,7,6)", lambda: coverage_success(OutcomeCounts(84, 2, 7, 6))[0], "86.87"),
    ("success (84,2,7,6)", lambda: coverage_success(OutcomeCounts(84, 2, 7, 6))[1], "84.85"),
]


def test_criterion_1_metric_reproduction():
    t0 = time.perf_counter()
    mismatches = [(label, str(fn()), want) for label, fn, want in PUBLISHED_CELLS if str(fn()) != want]
    # The published cells also agree with exact rational arithmetic.
    oracle = {
        "accuracy 38/39": pct(38, 39),
        "accuracy 392/408": pct(392, 408),
        "accuracy 396/408": pct(396, 408),
        "accuracy 258/312": pct(258, 312),
        "accuracy 305/312": pct(305, 312),
        "coverage (84,2,7,6)": pct(86, 99),
        "success (84,2,7,6)": pct(84, 99),
        "improvement 97.44 -> 100.00": half_up((Fraction(10000) - 9744) * 100 / 9744),
        "improvement over decision sums": half_up((Fraction(9706) - 9608) * 100 / 9608),
        "improvement over localization sums": half_up((Fraction(9776) - 8269) * 100 / 8269),
    }
    disagree = [label for label, _, want in PUBLISHED_CELLS if oracle[label] != want]
    elapsed = time.perf_counter() - t0
    ok = not mismatches and not disagree and elapsed < 1.0
    report(1, ok, f"{len(PUBLISHED_CELLS) - len(mismatches)}/{len(PUBLISHED_CELLS)} cells exact, {elapsed * 1000:.1f} ms")
    assert not mismatches, mismatches
    assert not disagree, disagree
    assert elapsed < 1.0


# 2. Ledger reproduction

EMAIL_ROW = (5586, 8295, 5281, 13970, 11823, 833)
EMAIL_PUBLISHED_TOTAL = 45790


def charged(values):
    ledger = TokenLedger()
    for stage, v in zip(STAGES, values):
        ledger.charge(stage, v)
    return ledger


def test_criterion_2_ledger_conservation():
    t0 = time.perf_counter()
    ledger = charged(EMAIL_ROW)
    assert [ledger[s] for s in STAGES] == list(EMAIL_ROW)
    assert ledger.total == sum(EMAIL_ROW)

    rng = random.Random(2026)
    for _ in range(1000):
        ledger, expected = TokenLedger(), dict.fromkeys(STAGES, 0)
        for _ in range(rng.randint(0, 40)):
            stage = rng.choice(STAGES)
            usage = Usage(rng.randint(0, 5000), rng.randint(0, 500))
            ledger.charge(stage, usage)
            expected[stage] += usage.prompt_tokens + usage.completion_tokens
        assert ledger.totals == expected
        assert ledger.total == sum(expected.values())
        assert TokenLedger.from_dict(ledger.to_dict()) == ledger
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0


@pytest.mark.xfail(strict=True, reason="the published Email row sums to 45788; its printed total is 45790")
def test_criterion_2_ledger_published_total():
    """The criterion asks for 45790. The six published per-stage values add up to
    45788, and a ledger whose total is the sum of its stages cannot reach the
    printed figure without breaking conservation."""
    total = charged(EMAIL_ROW).total
    ok = total == EMAIL_PUBLISHED_TOTAL
    report(2, ok, f"T_total={total}, published {EMAIL_PUBLISHED_TOTAL}; "
                  f"conservation holds on 1000 fuzzed sequences; the published total exceeds its "
                  f"own stage sum by {EMAIL_PUBLISHED_TOTAL - sum(EMAIL_ROW)}")
    assert ok


# 3. Perception corpus


def corpus():
    """Every declared screen of every distinct catalog app, rendered with its initial values."""
    seen, out = set(), []
    for fx in fixtures.ALL.values():
        spec = fx.spec()
        key = json.dumps(fx.app, sort_keys=True)
        if key in seen:
            continue
        seen.add(key)
        for sid in spec.screens:
            backend = SimBackend(spec)
            backend.screen_id = sid
            out.append((f"{fx.name}/{sid}", backend.render()))
    return out


def test_criterion_3_perception_corpus():
    t0 = time.perf_counter()
    ocr, cfg = FixtureOcr(), PerceptionConfig()
    screens = corpus()
    found = total = in_band = 0
    misses = []
    for name, rendered in screens:
        res = perceive(rendered.image, ocr, cfg)
        band = cfg.statusbar_frac * rendered.image.height
        in_band += sum(1 for w in res.widgets if w.box.y < band)
        for truth in rendered.truth:
            total += 1
            if any(w.box.iou(truth.box) >= 0.5 for w in res.widgets):
                found += 1
            else:
                misses.append((name, truth.id_hint))
    recall = found / total

    violations = []
    for n, rendered in enumerate(fuzz.screens(seed=7, count=1000)):
        img = rendered.image
        res = perceive(img, ocr, cfg)
        merged = merge_text_fragments(extract_text_fragments(img, ocr), cfg)
        band = cfg.statusbar_frac * img.height
        if fuzz.shape(fuzz.remerge(merged, cfg)) != fuzz.shape(merged):
            violations.append((n, "merge not idempotent"))
        if res.widgets.ids() != list(range(1, len(res.widgets) + 1)):
            violations.append((n, "ids not dense"))
        for w in res.widgets:
            if not w.box.in_bounds(img.width, img.height):
                violations.append((n, f"widget {w.id} out of bounds"))
            if w.box.y2 <= band:
                violations.append((n, f"widget {w.id} inside the status band"))
    elapsed = time.perf_counter() - t0
    ok = len(screens) >= 20 and recall >= 0.95 and in_band == 0 and not violations and elapsed < 30
    report(3, ok, f"{len(screens)} screens, recall {found}/{total} = {recall:.3f}, {in_band} in band, "
                  f"{len(violations)} fuzz violations over 1000 renders, {elapsed:.1f} s")
    assert len(screens) >= 20
    assert recall >= 0.95, misses
    assert in_band == 0
    assert not violations, violations[:5]
    assert elapsed < 30


# 4. End-to-end fixtures


def test_criterion_4_end_to_end(tmp_path):
    t0 = time.perf_counter()
    runs = {name: run_fixture(fx, tmp_path) for name, fx in fixtures.ALL.items()}
    elapsed = time.perf_counter() - t0
    problems = []
    c1_exact = 0
    for fx in fixtures.FIXTURES:
        r = runs[fx.name]
        if r.outcome.case == "c1" and r.events == fx.expected_events and r.provider.remaining == 0:
            c1_exact += 1
        else:
            problems.append(f"{fx.name}: case={r.outcome.case} events={r.events} left={r.provider.remaining}")
    shapes = {fx.shape for fx in fixtures.FIXTURES if runs[fx.name].outcome.case == "c1"}

    wrong = runs["wrong_widget_corrected"]
    causes = [rec["payload"]["cause"] for rec in wrong.records if rec["kind"] == "correction"]
    wrong_ok = wrong.outcome.case == "c1" and causes == ["localization_error"]

    ex = runs["shop_exhaustion"]
    ex_ok = ex.outcome.case == "c4" and ex.events == fixtures.EXHAUSTION.expected_events

    needed = {"hidden-menu note creation", "multi-field login", "calculator keypress sequence"}
    ok = c1_exact >= 10 and needed <= shapes and wrong_ok and ex_ok and elapsed < 60
    report(4, ok, f"{c1_exact}/{len(fixtures.FIXTURES)} fixtures c1 with exact events, "
                  f"wrong-widget causes {causes}, exhaustion case {ex.outcome.case}, {elapsed:.1f} s")
    assert not problems, problems
    assert c1_exact >= 10
    assert needed <= shapes
    assert wrong_ok, causes
    assert ex_ok
    assert elapsed < 60


# 5. Verification order and reversal, read off the session logs

RANK = {"loading": 0, "transition": 1, "change": 2, "completion": 3}


def order_violations(records):
    """Per (step, attempt): loading* transition (completion | change), with only
    loading checks allowed after the reversal re-captures the page."""
    bad = []
    groups = {}
    for rec in records:
        p = rec["payload"]
        if rec["kind"] == "verdict" and p.get("step", 0) > 0:
            groups.setdefault((p["step"], p["attempt"]), []).append(("check", p["check"]))
        elif rec["kind"] == "execute" and p["role"] == "reverse":
            groups.setdefault((p["step"], p["attempt"]), []).append(("reverse", None))
    for key, items in groups.items():
        cut = next((i for i, (k, _) in enumerate(items) if k == "reverse"), len(items))
        before = [c for _, c in items[:cut]]
        after = [c for k, c in items[cut + 1:]]
        ranks = [RANK[c] for c in before]
        if ranks != sorted(ranks) or before.count("transition") != 1 or not before[0] == "loading":
            bad.append((key, before))
        if "change" in before and "completion" in before:
            bad.append((key, before))
        if any(c != "loading" for c in after):
            bad.append((key, after))
    return bad


def reversal_violations(records):
    """After transition=no followed by change=yes, the next execute is the reverse op
    and it brings the sim back to the screen the failed op started from."""
    bad, checked = [], 0
    last_exec = None
    pending = None
    verdicts = {}
    for rec in records:
        kind, p = rec["kind"], rec["payload"]
        if kind == "execute":
            if pending is not None:
                checked += 1
                want = reverse_operation(Operation.from_dict(pending["op"]))
                if p["role"] != "reverse" or Operation.from_dict(p["op"]) != want:
                    bad.append(("not the reverse op", pending["op"], p["op"]))
                if p["screen_after"] != pending["screen_before"]:
                    bad.append(("screen not restored", pending["screen_before"], p["screen_after"]))
                pending = None
            last_exec = p
            verdicts = {}
        elif kind == "verdict" and p.get("step", 0) > 0 and p["check"] != "loading":
            verdicts[p["check"]] = p["verdict"]
            if p["check"] == "change" and verdicts.get("transition") == "no" and p["verdict"] == "yes":
                pending = last_exec
    if pending is not None:
        bad.append(("no operation after a reversible failure", pending["op"]))
    return bad, checked


def test_criterion_5_order_and_reversal(catalog_runs):
    order_bad, rev_bad, checked = [], [], 0
    for name, run in catalog_runs.items():
        order_bad += [(name, v) for v in order_violations(run.records)]
        bad, n = reversal_violations(run.records)
        rev_bad += [(name, v) for v in bad]
        checked += n
    ok = not order_bad and not rev_bad and checked > 0
    report(5, ok, f"stage order checked in {len(catalog_runs)} logs, {checked} reversals checked, "
                  f"{len(order_bad) + len(rev_bad)} violations")
    assert not order_bad, order_bad
    assert not rev_bad, rev_bad
    assert checked > 0


# 6. Bug mining


def test_criterion_6_bug_mining(tmp_path):
    t0 = time.perf_counter()
    run = run_fixture(fixtures.CRASH, tmp_path)
    elapsed = time.perf_counter() - t0
    bugs = run.outcome.bugs
    crash_lines = [line for line in run.backend.read_log_since(0) if "FATAL EXCEPTION" in line]
    own = [line for line in crash_lines if "demo.notes" not in line]
    # Two emissions of the same crash, one foreign crash; the first op that tapped export is op 1.
    export_taps = [r.index for r in run.outcome.ops if r.role == "step" and r.step == 2]
    ok = (len(bugs) == 1 and bugs[0].op_index == fixtures.CRASH.expected_bug_op == export_taps[0]
          and bugs[0].occurrences == 2 and bugs[0].app_id == "demo.notes" and len(crash_lines) == 3
          and elapsed < 5)
    report(6, ok, f"{len(bugs)} report(s), op_index {[b.op_index for b in bugs]}, "
                  f"occurrences {[b.occurrences for b in bugs]}, {len(crash_lines)} crash lines "
                  f"(1 foreign), {elapsed:.2f} s")
    assert len(crash_lines) == 3 and own
    assert len(bugs) == 1
    assert bugs[0].op_index == 1 == export_taps[0]
    assert bugs[0].occurrences == 2
    assert bugs[0].exception == "java.lang.IllegalStateException"
    assert elapsed < 5


def test_criterion_6_foreign_crash_only():
    from guiscenario.recorder import scan_logs
    from guiscenario.device.sim import format_log_ts

    ts = 1_791_936_010.0
    stamp = format_log_ts(ts)
    lines = [f"{stamp}  5150  5150 E AndroidRuntime: {part}" for part in fixtures.FOREIGN_CRASH.splitlines()]
    assert scan_logs(lines, [(ts - 1, ts + 1)], "demo.notes") == []


# 7. Determinism

_TS = re.compile(r'"(ts|started|finished)": -?[0-9.e+]+')
_SESSION = re.compile(r"[0-9a-f]{32}")


def masked(path):
    text = path.read_text()
    return _SESSION.sub("<session>", _TS.sub(r'"\1": <ts>', text))


def test_criterion_7_determinism(tmp_path):
    diffs = []
    for fx in fixtures.FIXTURES:
        a = run_fixture(fx, tmp_path / "a")
        b = run_fixture(fx, tmp_path / "b")
        la = masked(tmp_path / "a" / a.outcome.session_id / "log.jsonl")
        lb = masked(tmp_path / "b" / b.outcome.session_id / "log.jsonl")
        if la != lb:
            diffs.append(fx.name)
    ok = not diffs
    report(7, ok, f"{len(fixtures.FIXTURES) - len(diffs)}/{len(fixtures.FIXTURES)} fixtures byte-identical "
                  f"after masking timestamps and session ids")
    assert not diffs, diffs


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is None:
        return
    reporter.write_line("")
    reporter.write_line("acceptance summary")
    for k in sorted(RESULTS):
        reporter.write_line(RESULTS[k])
