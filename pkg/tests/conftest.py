import pytest

_LOG: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _LOG


def pytest_terminal_summary(terminalreporter):
    if _LOG:
        terminalreporter.section("acceptance criteria")
        for line in _LOG:
            terminalreporter.write_line(line)
