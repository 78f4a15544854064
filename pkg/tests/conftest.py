"""Shared fixtures: the acceptance verdict registry.

Acceptance tests record one PASS/FAIL line each; the lines are echoed in
the terminal summary so they survive pytest's output capture.
"""

import pytest

_verdicts: list[str] = []


@pytest.fixture(scope="session")
def verdict():
    def record(tag: str, ok: bool, detail: str = "") -> None:
        line = f"{tag}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f"  [{detail}]"
        _verdicts.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _verdicts:
        terminalreporter.section("acceptance checks")
        for line in _verdicts:
            terminalreporter.write_line(line)
