"""Shared pytest hooks.

The acceptance tests record one verdict line per criterion; the
terminal summary prints them together at the end of the session so the
full scorecard is visible even when per-test output is captured.
"""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
