"""Shared pytest wiring.

The acceptance tests append one verdict line per criterion to
ACCEPTANCE_VERDICTS; printing them from a terminal-summary hook keeps
them visible in normal (captured) runs, not just under -s.
"""

ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
