import pytest

from graphcodes.capacity import SimpleGraph


@pytest.fixture
def c5():
    return SimpleGraph.cycle(5)


@pytest.fixture
def p4():
    return SimpleGraph.path(4)


@pytest.fixture
def k4():
    return SimpleGraph.complete(4)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
