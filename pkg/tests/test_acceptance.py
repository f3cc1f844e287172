"""The eleven acceptance criteria on their full grids, all exact.

Each criterion is one test.  A one-line PASS/FAIL summary per criterion is
printed at the end of the pytest run (see ``conftest.py``) and when this file
is executed directly.
"""
import sys

import pytest

from booleq.verify import CRITERIA

RESULTS: dict[int, str] = {}


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    res = CRITERIA[number - 1]()
    RESULTS[number] = res.line()
    print(res.line())
    assert res.checks > 0
    assert res.passed, "\n".join(res.failures[:10])


if __name__ == "__main__":
    ok = True
    for crit in CRITERIA:
        res = crit()
        print(res.line(), flush=True)
        ok &= res.passed
    sys.exit(0 if ok else 1)
