import numpy as np
import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record a named acceptance check; the summary prints one line per check."""

    def record(name, passed, detail=""):
        _CRITERIA.append((name, bool(passed), detail))
        return bool(passed)

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
