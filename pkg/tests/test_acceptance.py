"""One test per acceptance criterion; each prints a PASS/FAIL line.

Tolerances: every comparison is exact rational arithmetic (zero tolerance).
Time limits: criterion 1 within 600 s for all 50 instances, criterion 7 within
300 s per run.  The lines are repeated in the terminal summary.
"""

import pytest

from liftlab import acceptance

RESULTS = []

ZERO_TOLERANCE = 0
assert acceptance.DUALITY_TIME_LIMIT == 600.0
assert acceptance.DECOMP_TIME_LIMIT == 300.0


@pytest.mark.parametrize("number", [num for num, _, _ in acceptance.CRITERIA], ids=lambda n: "criterion_%02d" % n)
def test_criterion(number):
    result = acceptance.run_criterion(number)
    RESULTS.append(result.line())
    print(result.line())
    assert result.ok, result.detail


def test_operation_examples():
    lines = []
    for name, ok, detail in acceptance.operation_examples():
        lines.append("example %-34s %s  (%s)" % (name, "PASS" if ok else "FAIL", detail))
    print("\n".join(lines))
    failed = [l for l in lines if " FAIL " in l]
    assert not failed, failed
