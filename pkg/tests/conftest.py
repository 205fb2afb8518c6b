"""Shared pytest plumbing: the acceptance suite registers one line per
criterion here and the terminal summary prints them all, pass or fail."""

ACCEPTANCE_LINES = []


def record_acceptance(criterion, ok, detail):
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"acceptance {criterion}: {status} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
