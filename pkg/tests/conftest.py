import sys
from pathlib import Path

import pytest

from hostsort.curves import LinearDemand, LinearSupply
from hostsort.equilibrium import MarketParams

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


@pytest.fixture(scope="session")
def s0_params():
    return MarketParams(num_buildings=10, tenants_per_building=5, base_utility=10.0, externality_cost=0.2)


@pytest.fixture(scope="session")
def s0_demand():
    return LinearDemand(intercept=2.0, slope=0.04)


@pytest.fixture(scope="session")
def s0_supply():
    return LinearSupply(p_min=0.0, p_max=1.25)


@pytest.fixture(scope="session")
def s0(s0_params, s0_demand, s0_supply):
    return s0_params, s0_demand, s0_supply


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
