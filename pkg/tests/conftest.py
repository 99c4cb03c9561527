import functools

import pytest
from hypothesis import HealthCheck, settings

from asmbly.molgraph import parse_smiles
from asmbly.rewrite import expand

settings.register_profile(
    "default", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

CUBANE = "C12C3C4C1C5C2C3C45"
PYRROLIDINE_DIMER = "C1CCN(C1)CC1CCCN1"


@functools.lru_cache(maxsize=None)
def expansion(smiles: str, rule: str):
    return expand(parse_smiles(smiles), rule)


@pytest.fixture(scope="session")
def cubane():
    return parse_smiles(CUBANE)


@pytest.fixture(scope="session")
def cubane_split():
    return expansion(CUBANE, "split")


@pytest.fixture(scope="session")
def cubane_edge():
    return expansion(CUBANE, "edge")


@pytest.fixture(scope="session")
def pyrr_split():
    return expansion(PYRROLIDINE_DIMER, "split")


@pytest.fixture(scope="session")
def pyrr_edge():
    return expansion(PYRROLIDINE_DIMER, "edge")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
