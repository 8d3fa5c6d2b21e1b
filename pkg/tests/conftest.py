import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Collects one summary line per acceptance criterion."""
    def record(number, ok, text):
        ACCEPTANCE_LINES.append((number, "PASS" if ok else "FAIL", text))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, text in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {text}")
