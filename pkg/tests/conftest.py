import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from freeclt.specfun import PrecisionContext  # noqa: E402


@pytest.fixture
def pc():
    return PrecisionContext(256)


@pytest.fixture
def pc_hi():
    return PrecisionContext(512)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number][1])
