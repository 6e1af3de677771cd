import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a named pass/fail line for the acceptance summary.

    Call ``criterion(number, ok, detail)`` once per test; the line is printed
    immediately (visible with ``-s``) and again in the terminal summary.
    """

    def record(number, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
