import pytest

# one line per acceptance criterion, filled in by tests/test_acceptance.py
CRITERIA = {}


@pytest.fixture
def record():
    def _record(number, ok, detail):
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"criterion {number}: {status}  {detail}"
        CRITERIA[number] = line
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[number])
