import pytest

from towerlab import FieldSpec, parse_expr, eval_expr

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def F2():
    return FieldSpec(2, ("x", "y"))


@pytest.fixture
def F3():
    return FieldSpec(3, ("x", "y"))


def E(spec, text):
    """Parse and evaluate an element of spec."""
    return eval_expr(parse_expr(text, spec), spec)
