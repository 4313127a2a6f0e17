import pytest

from uwqkd.channel import ChannelScenario
from uwqkd.config import OPTIMAL_SYSTEM, ORDINARY_SYSTEM
from uwqkd.qber import LinkBudget
from uwqkd.radiance import RadianceLookup, RadianceTable


class DarkTable:
    """Radiance table of a moonless, starless sea: no background at any depth."""

    def lookup(self, scenario, depth):
        return RadianceLookup(0.0)


@pytest.fixture
def dark_table():
    return DarkTable()


@pytest.fixture(scope="session")
def bundled_table():
    return RadianceTable.bundled()


@pytest.fixture
def ordinary():
    return ORDINARY_SYSTEM


@pytest.fixture
def optimal():
    return OPTIMAL_SYSTEM


@pytest.fixture
def make_link(bundled_table):
    """Factory of links in Jerlov I water under a full moon."""

    def make(mode="D", system=ORDINARY_SYSTEM, table=None, **scenario):
        scenario.setdefault("chi_c", system.chi_c)
        return LinkBudget(system, ChannelScenario(mode=mode, **scenario), table=table or bundled_table)

    return make
