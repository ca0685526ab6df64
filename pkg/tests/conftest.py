"""Shared test plumbing: the acceptance report printed after the run."""

_ACCEPTANCE: dict[str, str] = {}


def record_criterion(label: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE[label] = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[label])
