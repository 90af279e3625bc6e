import pytest

from kicked_dirac.basis import build_basis


@pytest.fixture(scope="session")
def basis64():
    return build_basis(1.0, 64)


@pytest.fixture(scope="session")
def basis256():
    return build_basis(1.0, 256)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
