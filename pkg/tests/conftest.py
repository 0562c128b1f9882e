"""Shared test plumbing.

Acceptance tests register a one-line verdict per criterion through
`record_criterion`; the terminal summary prints them after the run so
the pass/fail lines are visible even when pytest captures stdout.
"""

from __future__ import annotations

_CRITERIA: dict[int, tuple[str, bool]] = {}


def record_criterion(number: int, description: str, passed: bool) -> None:
    _CRITERIA[number] = (description, passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_CRITERIA):
        description, passed = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[criterion {number:02d}] {description}: {verdict}")
