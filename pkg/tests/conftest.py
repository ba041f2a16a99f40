import pytest

ACCEPTANCE = {}


@pytest.fixture
def record_acceptance():
    """Store one result line per acceptance criterion for the terminal summary."""

    def record(number, passed, detail):
        ACCEPTANCE[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:2d} {detail}")
