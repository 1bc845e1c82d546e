import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from symdispatch import solve  # noqa: E402


@pytest.fixture(scope="session")
def table10():
    """Default-mode table for the ten-slot horizon."""
    return solve(10)


@pytest.fixture(scope="session")
def table10_nearest():
    return solve(10, mode="nearest")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
