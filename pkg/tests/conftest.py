import sys

import pytest

from rexproof.terms import deep_recursion

deep_recursion()

# lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(autouse=True)
def _big_recursion():
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)
    yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
