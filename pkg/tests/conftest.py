import pytest

ACCEPTANCE: dict = {}


def record(number: int, title: str, checks: dict, detail: str = "") -> bool:
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    ACCEPTANCE[number] = (title, ok, failed, detail)
    return ok


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, failed, detail = ACCEPTANCE[n]
        line = f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}"
        if failed:
            line += f" | failed: {', '.join(failed)}"
        if detail:
            line += f" | {detail}"
        terminalreporter.write_line(line)
