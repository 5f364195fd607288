from fractions import Fraction

import pytest

from roughvi.config import ScenarioConfig

ACCEPTANCE_LINES = []


def small_config(**changes):
    """A scenario that sweeps in well under a second."""
    base = ScenarioConfig(name="small", source_flip_x1=Fraction(1, 2), nx_per_period=8, ny=4,
                          cell_n=16, eps_list=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)))
    return base.with_overrides(**changes).validate()


@pytest.fixture
def acceptance():
    def record(number, title, passed, detail=""):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
