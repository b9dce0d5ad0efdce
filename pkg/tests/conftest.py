from __future__ import annotations

# lines printed after the run by the acceptance suite: (key, text)
ACCEPTANCE_LINES: list[tuple[str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, text in sorted(ACCEPTANCE_LINES, key=lambda kv: kv[0]):
        terminalreporter.write_line(text)
