"""Shared test helpers: acceptance-criterion recording and summary printout."""

from __future__ import annotations

_ACCEPTANCE_RESULTS: list[tuple[float, str, bool, str]] = []


def record_criterion(num: float, description: str, passed: bool, detail: str = "") -> None:
    """Register one acceptance-criterion outcome for the terminal summary."""
    _ACCEPTANCE_RESULTS.append((num, description, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(_ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {num:g}: {desc}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
