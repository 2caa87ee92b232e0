"""The extension problem: given a pair (A, B), a target C and a homomorphism
h: A -> C, is there a homomorphism B -> C that agrees with h on the shared
elements?
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .cores import DEFAULT_CORE_LIMIT, ExtensionPair, extension_core, extension_pair_core
from .errors import DomainLimit, InvalidAnchor
from .homomorphism import DEFAULT_WIDTH_BUDGET, find_homomorphism, hom_via_decomposition
from .projection import projection_under_hom
from .relational import Atom, Structure, Symbol, gaifman_graph, relation_view, union
from .treewidth import DEFAULT_VERTEX_LIMIT, TreeDecomposition, treewidth_exact, treewidth_upper

ANS = Symbol("Ans")


@dataclass(frozen=True)
class ExtInstance:
    pair: ExtensionPair
    target: Structure
    anchor_map: Mapping = field(hash=False)

    def __post_init__(self):
        anchor = self.pair.anchor
        h = {v: self.anchor_map[v] for v in anchor.domain if v in self.anchor_map}
        missing = anchor.domain - set(h)
        if missing:
            raise InvalidAnchor(f"anchor map undefined on {sorted(map(str, missing))}")
        bad = [c for c in h.values() if c not in self.target.domain]
        if bad:
            raise InvalidAnchor(f"anchor map sends elements outside the target: {sorted(map(str, bad))}")
        for sym, tuples in anchor.relations.items():
            rel = relation_view(self.target, sym)
            for t in tuples:
                if tuple(h[x] for x in t) not in rel:
                    raise InvalidAnchor(f"anchor map is not a homomorphism: {sym}{t} has no image")
        object.__setattr__(self, "anchor_map", h)


def ext_bruteforce(i: ExtInstance) -> bool:
    shared = i.pair.anchor.domain & i.pair.extension.domain
    fixed = {v: i.anchor_map[v] for v in shared}
    return find_homomorphism(i.pair.extension, i.target, fixed) is not None


@dataclass(frozen=True)
class _Prepared:
    anchored: Structure            # A u S, the structure the anchor map is extended on
    extcore: Structure
    td: TreeDecomposition
    exact: bool


@lru_cache(maxsize=4096)
def _prepare(pair: ExtensionPair, core_limit: int) -> _Prepared:
    s = extension_pair_core(pair, core_limit)
    ec = extension_core(pair, core_limit)
    g = gaifman_graph(ec)
    if len(g.vertices) <= DEFAULT_VERTEX_LIMIT:
        td, exact = treewidth_exact(g), True
    else:
        td, exact = treewidth_upper(g), False
    return _Prepared(union(pair.anchor, s), ec, td, exact)


def ext_via_extcore(i: ExtInstance, width_budget: int = DEFAULT_WIDTH_BUDGET,
                    core_limit: int = DEFAULT_CORE_LIMIT) -> bool:
    """Decide the instance on the folded structure ``A u S`` instead of ``B``.

    ``S`` is the core of ``A u B`` with the anchor pinned; extending ``h`` to
    ``A u S`` is equivalent to extending it to ``B``.  After projecting the
    anchor map away, the residual homomorphism problem has the Gaifman graph
    of the extension core, whose decomposition drives the dynamic program
    when it is narrow enough.
    """
    prep = _prepare(i.pair, core_limit)
    q_prime, d_prime = projection_under_hom(prep.anchored, i.target, i.anchor_map)
    if prep.td.width <= width_budget:
        # Q' has the extension core's elements and a subset of its tuples, so the decomposition carries over
        return hom_via_decomposition(q_prime, prep.td, d_prime) is not None
    return find_homomorphism(q_prime, d_prime) is not None


def decide_ext(i: ExtInstance, width_budget: int = DEFAULT_WIDTH_BUDGET,
               core_limit: int = DEFAULT_CORE_LIMIT) -> bool:
    """``ext_via_extcore``, falling back to plain search when the core is too large to compute."""
    try:
        return ext_via_extcore(i, width_budget, core_limit)
    except DomainLimit:
        return ext_bruteforce(i)


def extension_exists(anchor_vars: Iterable, atoms: Structure | Iterable[Atom], target: Structure,
                     h: Mapping, width_budget: int = DEFAULT_WIDTH_BUDGET) -> bool:
    """Can ``h`` (on ``anchor_vars``) be extended to map ``atoms`` into ``target``?

    The anchor is the bare set of variables with no relations, which has the
    same extension core as marking each of them.
    """
    anchor_vars = frozenset(anchor_vars)
    ext = atoms if isinstance(atoms, Structure) else Structure.from_atoms(atoms)
    pair = ExtensionPair(Structure(anchor_vars), union(Structure(anchor_vars), ext))
    return decide_ext(ExtInstance(pair, target, {v: h[v] for v in anchor_vars}), width_budget)


def cq_to_ext(body: Iterable[Atom], free: Sequence) -> ExtensionPair:
    anchor = Structure.from_atoms([Atom(ANS, tuple(free))])
    return ExtensionPair(anchor, Structure.from_atoms(body))
