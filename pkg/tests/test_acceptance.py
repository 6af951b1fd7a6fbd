"""The eleven acceptance criteria, one test each.

Every test prints a single pass/fail line; conftest repeats them in the
terminal summary so they survive output capture.
"""

import pytest

from pvpatch.config import RunConfig
from pvpatch.suite import CRITERIA, run_criterion

LINES = {}


@pytest.mark.parametrize("k", range(1, len(CRITERIA) + 1), ids=lambda k: f"criterion_{k}")
def test_criterion(k):
    res = run_criterion(k, RunConfig())
    line = res.line() + f" {res.seconds:.2f}s"
    LINES[k] = line
    print(line)
    assert res.passed, res.to_json()["detail"]
