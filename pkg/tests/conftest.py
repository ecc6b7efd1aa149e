import pytest

_OUTCOMES = []


@pytest.fixture
def criterion():
    """Record a named acceptance outcome; lines are echoed in the terminal summary."""

    def record(number, passed, detail=""):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _OUTCOMES.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_OUTCOMES):
        terminalreporter.write_line(line)
