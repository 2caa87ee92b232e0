import itertools
import sys

import pytest
from hypothesis import HealthCheck, settings

from patterntrees.patterns import PatternTree
from patterntrees.relational import Const, Structure, Var, atom

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

x, y, z, w, t, s, c = (Var(n) for n in "xyzwtsc")


def consts(*names):
    return [Const(n) for n in names]


def facts(*specs):
    """facts(("r1", "a", "b"), ...) -> Structure over constants."""
    return Structure.from_atoms([atom(*sp) for sp in specs])


def ticket_tree():
    return PatternTree.build([
        (None, [atom("ticket", "?t")]),
        (0, [atom("seatclass", "?s", "?c"), atom("empty", "?s"), atom("class", "?t", "?c")]),
        (0, [atom("seatclass", "?s", "?c"), atom("empty", "?s")]),
    ])


def ticket_db():
    return facts(("ticket", "1"), ("class", "1", "E"), ("seatclass", "1", "E"),
                 ("seatclass", "2", "F"), ("empty", "1"), ("empty", "2"))


def clique_tree(n):
    ys = [f"?y{i}" for i in range(1, n + 1)]
    clique = [atom("c", u, v) for u, v in itertools.permutations(ys, 2)]
    return PatternTree.build([(None, [atom("a", "?x")]), (0, clique), (0, [atom("c", "?z1", "?z2")])])


def chain_tree(free=("x", "w")):
    return PatternTree.build(
        [(None, [atom("r1", "?x", "?y")]), (0, [atom("r2", "?y", "?z"), atom("r3", "?z", "?w")])],
        [Var(v) for v in free])


@pytest.fixture
def p_ticket():
    return ticket_tree()


@pytest.fixture
def d_ticket():
    return ticket_db()


@pytest.fixture
def p_chain():
    return chain_tree()


@pytest.fixture
def db_one():
    return facts(("r1", "a", "b"))


@pytest.fixture
def db_path():
    return facts(("r1", "a", "b"), ("r2", "b", "c"), ("r3", "c", "d"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
