from fractions import Fraction as F

import pytest
from hypothesis import strategies as st

from designldp.designs import catalog_lookup, catalog_names, classify, validate_set_system
from designldp.errors import DesignLDPError

THETAS = [F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4)]


@pytest.fixture(params=catalog_names())
def catalog_design(request):
    return catalog_lookup(request.param)


@pytest.fixture
def ag23():
    return catalog_lookup("ag23")


@pytest.fixture
def pairs4():
    return catalog_lookup("pairs-4")


@pytest.fixture
def warner():
    return catalog_lookup("warner")


@pytest.fixture
def fano_minus():
    return catalog_lookup("fano-minus-point")


def pure_catalog():
    return [catalog_lookup(n) for n in catalog_names() if classify(catalog_lookup(n)).is_pure]


@st.composite
def set_systems(draw, min_points=2, max_points=6, max_blocks=9, dualisable=False):
    """Random valid set systems; with ``dualisable`` no point lies in every block."""
    v = draw(st.integers(min_points, max_points))
    b = draw(st.integers(1, max_blocks))
    blocks = draw(
        st.lists(
            st.sets(st.integers(0, v - 1), min_size=1, max_size=v - 1).map(sorted),
            min_size=b,
            max_size=b,
        )
    )
    covered = set().union(*map(set, blocks))
    for x in range(v):
        if x not in covered:
            blocks.append([x])
    s = validate_set_system(v, blocks)
    if dualisable:
        from hypothesis import assume

        assume(all(c < s.b for c in s.replication_counts()))
    return s


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
