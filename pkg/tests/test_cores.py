import random
from itertools import product

import pytest

from conftest import clique_tree
from oracles import hom_exists
from patterntrees.cores import ExtensionPair, core, extension_core, extension_pair_core, is_isomorphic
from patterntrees.errors import DomainLimit
from patterntrees.homomorphism import find_homomorphism
from patterntrees.projection import projection_under_hom, projection_under_set
from patterntrees.relational import Const, Structure, Symbol, Var, atom, gaifman_graph, union
from patterntrees.treewidth import treewidth_exact


def rand_structure(rng, n, density, symbols=(("e", 2), ("u", 1))):
    elems = [Var(f"e{i}") for i in range(n)]
    rels = {Symbol(name): {tp for tp in product(elems, repeat=k) if rng.random() < density} for name, k in symbols}
    return Structure(elems, rels)


def test_path_folds_to_edge():
    p = Structure.from_atoms([atom("e", "?a", "?b"), atom("e", "?c", "?b")])
    assert len(core(p).domain) == 2


def test_symmetric_path_folds_to_symmetric_edge():
    p = Structure.from_atoms([atom("e", u, v) for u, v in [("?a", "?b"), ("?b", "?a"), ("?b", "?c"), ("?c", "?b")]])
    assert len(core(p).domain) == 2


def test_triangle_is_a_core():
    tri = Structure.from_atoms([atom("e", "?a", "?b"), atom("e", "?b", "?c"), atom("e", "?c", "?a")])
    assert core(tri) == tri


def test_core_limit():
    s = Structure([Var(f"v{i}") for i in range(20)])
    with pytest.raises(DomainLimit):
        core(s)


def test_anchor_pins_elements():
    # without pinning, b folds onto d; with a and c anchored it cannot
    anchor = Structure([Var("a"), Var("c")])
    ext = Structure.from_atoms([atom("e", "?a", "?b"), atom("e", "?b", "?c"), atom("e", "?a", "?d")])
    pc = extension_pair_core(ExtensionPair(anchor, ext))
    assert Var("b") in pc.domain and Var("d") not in pc.domain
    ec = extension_core(ExtensionPair(anchor, ext))
    assert ec.domain == {Var("b")}
    assert set(map(str, ec.atoms())) == {"e[1=?a](?b)", "e[2=?c](?b)"}


def test_clique_extension_core_keeps_the_clique():
    p = clique_tree(4)
    anchor = Structure.from_atoms(p.labels[0])
    pair = ExtensionPair(anchor, union(anchor, Structure.from_atoms(p.labels[1])))
    assert treewidth_exact(gaifman_graph(extension_core(pair))).width == 3


def test_projection_under_set_example():
    s = Structure.from_atoms([atom("r3", "?z", "?w"), atom("r2", "?y", "?z")])
    got = projection_under_set(s, {Var("z")})
    assert set(map(str, got.atoms())) == {"r3[1=?z](?w)", "r2[2=?z](?y)"}
    twice = projection_under_set(got, {Var("w")})
    assert set(map(str, twice.atoms())) == {"r3[1=?z,2=?w]()", "r2[2=?z](?y)"}


def test_isomorphism():
    a = Structure.from_atoms([atom("e", "?a", "?b")])
    b = Structure.from_atoms([atom("e", "?x", "?y")])
    c = Structure.from_atoms([atom("e", "?x", "?x")])
    assert is_isomorphic(a, b)
    assert not is_isomorphic(a, c)


def test_core_invariants_on_random_structures():
    rng = random.Random(21)
    for _ in range(200):
        a = rand_structure(rng, rng.randint(1, 8), rng.choice([0.1, 0.2, 0.3]))
        k = core(a)
        assert k.domain <= a.domain
        assert find_homomorphism(a, k) is not None and find_homomorphism(k, a) is not None
        assert is_isomorphic(core(k), k)


def test_extension_core_invariants_on_random_pairs():
    rng = random.Random(22)
    for _ in range(200):
        b = rand_structure(rng, rng.randint(1, 8), rng.choice([0.1, 0.2, 0.3]))
        elems = sorted(b.domain, key=str)
        anchor = Structure(rng.sample(elems, rng.randint(0, min(3, len(elems)))))
        pair = ExtensionPair(anchor, union(anchor, b))
        pc = extension_pair_core(pair)
        assert anchor.domain <= pc.domain
        fix = {v: v for v in anchor.domain}
        assert find_homomorphism(union(anchor, b), pc, fix) is not None
        assert find_homomorphism(pc, union(anchor, b), fix) is not None
        ec = extension_core(pair)
        assert is_isomorphic(core(ec), ec)


def test_projection_preserves_extendability():
    rng = random.Random(23)
    for _ in range(300):
        q = rand_structure(rng, rng.randint(1, 5), 0.2)
        d = rand_structure(rng, rng.randint(1, 4), 0.5)
        d = d.rename({e: Const(e.name) for e in d.domain})
        dom = sorted(q.domain, key=str)
        h_dom = rng.sample(dom, rng.randint(0, len(dom)))
        h = {v: rng.choice(sorted(d.domain, key=str)) for v in h_dom}
        qp, dp = projection_under_hom(q, d, h)
        assert (find_homomorphism(qp, dp) is not None) == hom_exists(q, d, h)
