"""Evaluation formulas and report tables.

All percentages are :class:`~decimal.Decimal` values rounded half-up to two
places, so ``str(accuracy(38, 39)) == "97.44"``.
"""

from __future__ import annotations

import json
from collections import OrderedDict
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .llm.messages import STAGES

CENT = Decimal("0.01")
HUNDRED = Decimal(100)


def _pct(x) -> Decimal:
    return Decimal(x).quantize(CENT, rounding=ROUND_HALF_UP)


def _dec(x) -> Decimal:
    return x if isinstance(x, Decimal) else Decimal(str(x))


def accuracy(n: int, N: int) -> Decimal:
    if N <= 0:
        raise ValueError("accuracy needs N > 0")
    if not 0 <= n <= N:
        raise ValueError(f"need 0 <= n <= N, got n={n}, N={N}")
    return _pct(HUNDRED * n / Decimal(N))


def improvement(acc1, accf) -> Decimal | None:
    """Relative gain of the final over the initial accuracy; None when acc1 is 0."""
    a1, af = _dec(acc1), _dec(accf)
    if a1 == 0:
        return None
    return _pct(HUNDRED * (af - a1) / a1)


@dataclass(frozen=True)
class OutcomeCounts:
    c1: int = 0
    c2: int = 0
    c3: int = 0
    c4: int = 0

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3, self.c4) < 0:
            raise ValueError("outcome counts must be non-negative")

    @property
    def total(self) -> int:
        return self.c1 + self.c2 + self.c3 + self.c4

    @classmethod
    def of(cls, cases) -> OutcomeCounts:
        cases = list(cases)
        return cls(*(cases.count(c) for c in ("c1", "c2", "c3", "c4")))


def coverage_success(counts: OutcomeCounts) -> tuple[Decimal, Decimal]:
    if counts.total <= 0:
        raise ValueError("no outcomes to rate")
    total = Decimal(counts.total)
    return _pct(HUNDRED * (counts.c1 + counts.c2) / total), _pct(HUNDRED * counts.c1 / total)


def fmt(value) -> str:
    return "n/a" if value is None else str(value)


# Reports

STAGE_COLUMNS = [f"T{i}" for i in range(1, len(STAGES) + 1)]


def _row(label, outs) -> OrderedDict:
    row = OrderedDict(group=label, sessions=len(outs))
    counts = OutcomeCounts.of(o.case for o in outs)
    row.update(c1=counts.c1, c2=counts.c2, c3=counts.c3, c4=counts.c4)
    c, s = coverage_success(counts)
    row.update(C=c, S=s)
    for prefix, attr in (("dec", "decisions"), ("loc", "localizations")):
        N = sum(getattr(o, attr).N for o in outs)
        n1 = sum(getattr(o, attr).n1 for o in outs)
        nf = sum(getattr(o, attr).nf for o in outs)
        a1 = accuracy(n1, N) if N else None
        af = accuracy(nf, N) if N else None
        row.update({f"{prefix}_N": N, f"{prefix}_n1": n1, f"{prefix}_nf": nf, f"{prefix}_acc1": a1,
                    f"{prefix}_accf": af, f"{prefix}_gain": improvement(a1, af) if a1 is not None else None})
    for col, stage in zip(STAGE_COLUMNS, STAGES):
        row[col] = sum(o.ledger[stage] for o in outs)
    row["T_total"] = sum(o.ledger.total for o in outs)
    return row


@dataclass
class Report:
    rows: list[OrderedDict]
    summary: OrderedDict | None

    @property
    def columns(self) -> list[str]:
        return list(self.rows[0].keys()) if self.rows else []

    def to_dict(self) -> dict:
        def clean(r):
            return {k: (str(v) if isinstance(v, Decimal) else v) for k, v in r.items()}
        return {"rows": [clean(r) for r in self.rows], "summary": clean(self.summary) if self.summary else None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        if not self.rows:
            return "(no sessions)\n"
        lines = self.rows + ([self.summary] if self.summary else [])
        cols = self.columns
        cells = [cols] + [[fmt(r[c]) for c in cols] for r in lines]
        widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
        out = []
        for n, row in enumerate(cells):
            out.append("  ".join(v.ljust(w) if i == 0 else v.rjust(w) for i, (v, w) in enumerate(zip(row, widths))))
            if n == 0 or (self.summary and n == len(cells) - 2):
                out.append("  ".join("-" * w for w in widths))
        return "\n".join(out) + "\n"


def report(outcomes, grouping: str = "scenario") -> Report:
    """One row per group (scenario name or case) plus a Sum/Avg row over all sessions."""
    outcomes = list(outcomes)
    if not outcomes:
        return Report([], None)
    groups: OrderedDict[str, list] = OrderedDict()
    for o in outcomes:
        key = getattr(o, grouping) if grouping != "session" else o.session_id
        groups.setdefault(str(key), []).append(o)
    keys = sorted(groups) if grouping == "case" else list(groups)
    rows = [_row(k, groups[k]) for k in keys]
    return Report(rows, _row("Sum/Avg", outcomes))
