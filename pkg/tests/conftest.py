import pytest

from end_menger import fixtures


@pytest.fixture(params=fixtures.NAMES)
def fixture_name(request):
    return request.param


def load(name):
    return fixtures.load(name)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
