import pytest

from helpers import named_graphs

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def graphs():
    return named_graphs()


@pytest.fixture
def record_acceptance():
    def record(criterion: str, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
