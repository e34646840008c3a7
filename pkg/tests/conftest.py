"""Shared pytest plumbing.

Acceptance tests record one human-readable pass/fail line each; echoing
them in the terminal summary keeps the gate auditable even when pytest
captures test output.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
