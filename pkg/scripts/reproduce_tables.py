"""Recompute the published accuracy, coverage and token-ledger cells from their raw counts."""

from guiscenario.llm.messages import STAGES
from guiscenario.metrics import OutcomeCounts, accuracy, coverage_success, improvement
from guiscenario.recorder import TokenLedger

ACCURACY = [
    ("decision, Email row", 38, 39),
    ("decision, Sum/Avg initial", 392, 408),
    ("decision, Sum/Avg final", 396, 408),
    ("localization, Sum/Avg initial", 258, 312),
    ("localization, Sum/Avg final", 305, 312),
]
EMAIL_TOKENS = (5586, 8295, 5281, 13970, 11823, 833)
EMAIL_PUBLISHED_TOTAL = 45790


def main():
    for label, n, N in ACCURACY:
        print(f"{label:32s} {n}/{N} -> {accuracy(n, N)}")
    print(f"{'gain, Email row':32s} -> {improvement('97.44', '100.00')}")
    print(f"{'gain, decisions over sums':32s} -> {improvement(accuracy(392, 408), accuracy(396, 408))}")
    print(f"{'gain, localization over sums':32s} -> {improvement(accuracy(258, 312), accuracy(305, 312))}")
    c, s = coverage_success(OutcomeCounts(84, 2, 7, 6))
    print(f"{'coverage / success (84,2,7,6)':32s} -> C={c} S={s}")
    ledger = TokenLedger()
    for stage, amount in zip(STAGES, EMAIL_TOKENS):
        ledger.charge(stage, amount)
    print(f"{'token ledger, Email row':32s} -> T_total={ledger.total} "
          f"(published {EMAIL_PUBLISHED_TOTAL}, off by {EMAIL_PUBLISHED_TOTAL - ledger.total})")


if __name__ == "__main__":
    main()
