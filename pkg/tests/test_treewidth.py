import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from oracles import treewidth_by_permutations
from patterntrees.errors import InvalidDecomposition, VertexLimit
from patterntrees.relational import Graph
from patterntrees.treewidth import (TreeDecomposition, decomposition_from_order, min_fill_order, treewidth,
                                    treewidth_exact, treewidth_upper)


def complete(n):
    return Graph.from_edges(itertools.combinations(range(n), 2), range(n))


def cycle(n):
    return Graph.from_edges([(i, (i + 1) % n) for i in range(n)])


def path(n):
    return Graph.from_edges([(i, i + 1) for i in range(n - 1)], range(n))


def test_single_vertex_width_zero():
    assert treewidth_exact(Graph(frozenset([0]))).width == 0


def test_empty_graph_width_minus_one():
    td = treewidth_exact(Graph())
    assert td.width == -1
    assert td.is_valid_for(Graph())


def test_k4_width_three():
    assert treewidth_exact(complete(4)).width == 3
    assert treewidth_upper(complete(4)).width == 3


def test_c5_width_two():
    # frozen from exhaustive elimination-order search
    assert treewidth_by_permutations(cycle(5)) == 2
    assert treewidth_exact(cycle(5)).width == 2


def test_c5_upper_bound_between_two_and_three():
    td = treewidth_upper(cycle(5))
    assert 2 <= td.width <= 3
    assert td.is_valid_for(cycle(5))


def test_tree_on_five_vertices():
    star = Graph.from_edges([(0, 1), (0, 2), (2, 3), (2, 4)])
    assert treewidth_upper(star).width == 1
    assert treewidth_exact(star).width == 1


def test_grid_three_by_three():
    g = Graph.from_edges([((i, j), (i + 1, j)) for i in range(2) for j in range(3)]
                         + [((i, j), (i, j + 1)) for i in range(3) for j in range(2)])
    assert treewidth_exact(g).width == 3


def test_cap_returns_none_when_exceeded():
    assert treewidth_exact(complete(5), cap=3) is None
    assert treewidth_exact(complete(5), cap=4).width == 4


def test_vertex_limit():
    with pytest.raises(VertexLimit):
        treewidth_exact(path(30))
    w, exact, td = treewidth(path(30))
    assert (w, exact) == (1, False)
    assert td.is_valid_for(path(30))


def test_disconnected_graph_gives_one_tree():
    g = Graph.from_edges([(0, 1), (2, 3), (3, 4), (4, 2)], [5])
    td = treewidth_exact(g)
    assert td.width == 2
    td.check(g)


def test_invalid_decomposition_is_reported():
    g = path(3)
    bad = TreeDecomposition((frozenset({0, 1}), frozenset({2})), (None, 0))
    with pytest.raises(InvalidDecomposition, match="edge"):
        bad.check(g)
    split = TreeDecomposition((frozenset({0, 1}), frozenset({2}), frozenset({1, 2})), (None, 0, 1))
    assert any("not connected" in p for p in split.problems(g))


@pytest.mark.parametrize("n", range(1, 7))
def test_cliques(n):
    assert treewidth_exact(complete(n)).width == n - 1


@pytest.mark.parametrize("n", range(4, 9))
def test_cycles(n):
    assert treewidth_exact(cycle(n)).width == 2


@st.composite
def small_graphs(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(edges, range(n))


@given(small_graphs())
def test_exact_not_above_heuristic_and_both_valid(g):
    ex, up = treewidth_exact(g), treewidth_upper(g)
    assert ex.width <= up.width
    assert ex.is_valid_for(g) and up.is_valid_for(g)


@given(small_graphs(max_n=7))
def test_exact_matches_permutation_oracle(g):
    assert treewidth_exact(g).width == treewidth_by_permutations(g)


def test_networkx_heuristic_is_never_below_exact():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(2, 12)
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.4]
        g = Graph.from_edges(edges, range(n))
        nxg = nx.Graph(list(edges))
        nxg.add_nodes_from(range(n))
        ub, _ = nx.algorithms.approximation.treewidth_min_fill_in(nxg)
        assert treewidth_exact(g).width <= max(ub, 0)


def test_decomposition_from_any_order_is_valid():
    rng = random.Random(1)
    for _ in range(30):
        n = rng.randint(1, 9)
        g = Graph.from_edges([e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5], range(n))
        order = list(range(n))
        rng.shuffle(order)
        assert decomposition_from_order(g, order).is_valid_for(g)
        assert sorted(min_fill_order(g)) == list(range(n))
