import pytest

from helpers import Z6_TAIL, field, finite_ext, mixed_ext


@pytest.fixture
def z6():
    return finite_ext([field(2), field(3)]).A


@pytest.fixture
def z4():
    return finite_ext([[2, 2, [0, 1]]]).A


@pytest.fixture
def z12():
    return finite_ext([[2, 2, [0, 1]], field(3)]).A


@pytest.fixture
def diag_f2():
    return finite_ext([field(2), field(2)], B="ambient")


@pytest.fixture
def z_in_q():
    return mixed_ext([{"flavor": "Z"}])


@pytest.fixture
def z_x_z6():
    return mixed_ext([{"flavor": "Z"}], Z6_TAIL)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda ln: int(ln.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
