import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, tuple[str, bool]] = {}


def record_criterion(number, title, passed):
    _CRITERIA[number] = (title, passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed = _CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}")


@pytest.fixture(scope="session")
def scan9():
    from wheelforge import ScanConfig, WheelLevel, scan_level

    return scan_level(ScanConfig(WheelLevel(9)))
