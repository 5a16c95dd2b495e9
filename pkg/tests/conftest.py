import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ehcap.capacity import AwgnChannel  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def channel():
    return AwgnChannel(1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
