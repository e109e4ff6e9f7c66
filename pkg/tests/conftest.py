import pytest

from satotate.curves import TraceTable
from satotate.io import load_or_build, parse_curve

ACCEPTANCE_LINES = []

# non-CM curves used across the suite (label -> a-invariants)
BATTERY = {
    "11a1": "0,-1,1,-10,-20",
    "37a1": "0,0,1,-1,0",
    "389a1": "0,1,1,-2,0",
    "5077a1": "0,0,1,-7,6",
    "37b1": "0,1,1,-23,-50",
    "x3+x+1": "1,1",
}


@pytest.fixture(scope="session")
def table_cache(tmp_path_factory):
    return tmp_path_factory.mktemp("trace-cache")


@pytest.fixture(scope="session")
def e11(): return parse_curve("11a1")


@pytest.fixture(scope="session")
def e37(): return parse_curve("37a1")


@pytest.fixture(scope="session")
def tables(table_cache):
    """Cached trace tables with cutoff exactly x: tables(label, x)."""
    memo = {}

    def get(label, x):
        key = (label, x)
        if key not in memo:
            # the cache may hold a longer table; cut it back to exactly x
            t = load_or_build(parse_curve(label), x, table_cache)
            memo[key] = TraceTable(t.curve, float(x), tuple(r for r in t.records if r.p <= x))
        return memo[key]

    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
