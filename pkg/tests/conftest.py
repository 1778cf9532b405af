import pytest

# criterion number -> (title, passed, detail); filled by test_acceptance.py
RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        RESULTS[number] = (title, passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        title, passed, detail = RESULTS[number]
        line = f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
