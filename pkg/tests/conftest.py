import pytest
from hypothesis import settings

from gyrocasimir.lifshitz import PlateSystem
from gyrocasimir.materials import IdealPlate, WeylParams

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=200)
settings.load_profile("repo")

# filled by test_acceptance; printed after the run whatever the capture mode
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def conductors():
    return PlateSystem.from_materials(IdealPlate.PERFECT_CONDUCTOR,
                                      IdealPlate.PERFECT_CONDUCTOR, temperature=1.0)


@pytest.fixture(scope="session")
def boyer():
    return PlateSystem.from_materials(IdealPlate.PERFECT_CONDUCTOR,
                                      IdealPlate.INFINITELY_PERMEABLE, temperature=1.0)


@pytest.fixture(scope="session")
def weyl_black():
    w = WeylParams(1.0, 3e15)
    return PlateSystem.from_materials(w, w)
