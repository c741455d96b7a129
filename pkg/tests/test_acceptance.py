"""Acceptance suite: one test and one printed line per criterion.

The lines are collected and repeated in the terminal summary, so a plain
``pytest tests/test_acceptance.py`` shows the full pass/fail table.
"""

import pytest

from scatter1d import verify

import conftest


@pytest.mark.parametrize("number", sorted(verify.CHECKS))
def test_criterion(number):
    c = verify.run_check(number)
    conftest.ACCEPTANCE_LINES.append(c.line())
    print(c.line())
    assert c.passed, c.line()
