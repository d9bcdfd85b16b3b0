import pytest
from hypothesis import HealthCheck, settings

from ncpower.netmodel import build_regular, nsfnet, usnet
from ncpower.power import TABLE4, TABLE5_GREENTOUCH
from ncpower.routing import route_all
from ncpower.traffic import DemandMatrix, generate_matrix

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def nsf():
    return nsfnet()


@pytest.fixture(scope="session")
def us():
    return usnet()


@pytest.fixture(scope="session")
def table4():
    return TABLE4


@pytest.fixture(scope="session")
def greentouch():
    return TABLE5_GREENTOUCH


@pytest.fixture(scope="session")
def line3():
    return build_regular("line", 3, link_km=80)


@pytest.fixture
def line3_plan(line3):
    dm = DemandMatrix.from_mapping(3, {(1, 3): 40.0, (3, 1): 40.0})
    return route_all(line3, dm)


@pytest.fixture(scope="session")
def nsf_ensemble(nsf):
    """Five seeds at every even hour, the ensemble used for daily figures."""
    return [route_all(nsf, generate_matrix(nsf, h, s)) for h in range(0, 24, 2) for s in range(5)]


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def record_criterion(request, capsys):
    """Record and echo one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, passed: bool, detail: str, seconds: float) -> None:
        line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'}  ({seconds:.2f}s)  {detail}"
        _CRITERIA[number] = line
        with capsys.disabled():
            print(f"\n{line}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
