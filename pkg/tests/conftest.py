import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(label, ok, detail):
        ACCEPTANCE_LINES.append(f"AC{label!s:<3} {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: (int(s[2:5].strip("ab ")), s[:5])):
            terminalreporter.write_line(line)
