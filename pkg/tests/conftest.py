"""Shared test fixtures.

The ``acceptance`` fixture gives acceptance tests a ``record`` callable:
it prints one PASS/FAIL line immediately, stores the line, and raises on
failure.  A terminal-summary hook replays every recorded line after the
run so the verdicts stay visible even with output capture enabled.
"""

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    def record(ok: bool, name: str, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
