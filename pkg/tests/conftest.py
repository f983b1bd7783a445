import pytest
from hypothesis import settings

from trimf.lgroup import WeightTriple

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []

DOMESTIC = [WeightTriple(2, 2, n) for n in (2, 3, 4, 5, 8)] + [
    WeightTriple(2, 3, 3), WeightTriple(2, 3, 4), WeightTriple(2, 3, 5)]


@pytest.fixture(params=DOMESTIC, ids=str)
def domestic(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
