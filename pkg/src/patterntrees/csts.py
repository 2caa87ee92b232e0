"""Critical subtrees and the evaluation engine for projection-free pattern trees.

For a subtree T' every child t gives one test: can the mapping on the
nodes before t be extended to the atoms of t?  Many of these tests are
implied by others, and only the surviving ones need to be run.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .cores import ExtensionPair, extension_core
from .errors import CapExceeded
from .ext import ExtInstance, decide_ext
from .homomorphism import DEFAULT_WIDTH_BUDGET, find_homomorphism
from .patterns import PatternTree, Subtree, is_projection_free, pp_solution_subtree
from .relational import Structure, gaifman_graph, variables_of
from .treewidth import DEFAULT_VERTEX_LIMIT, treewidth_exact, treewidth_upper

DEFAULT_SUBTREE_CAP = 4096


@dataclass(frozen=True)
class CriticalPair:
    """The test for one child: extend a mapping of ``context`` to ``context | child_label``.

    ``pinned`` holds variables that are bound before the child in the whole
    tree and shared with both the subtree and the child, but do not occur in
    ``context``.  It is always empty for well-designed trees.
    """

    context: frozenset
    child_label: frozenset
    child: int
    pinned: frozenset = frozenset()

    @property
    def anchor_vars(self) -> frozenset:
        return variables_of(self.context) | self.pinned

    def anchor(self) -> Structure:
        return Structure.from_atoms(self.context, domain=self.pinned)

    def extension(self) -> Structure:
        return Structure.from_atoms(self.context | self.child_label, domain=self.pinned)

    def pair(self) -> ExtensionPair:
        return ExtensionPair(self.anchor(), self.extension())


def child_pairs(p: PatternTree, sub: Subtree) -> list[CriticalPair]:
    """One pair per child of ``sub``, in order."""
    sub_vars = p.vars_of(sub)
    out = []
    for t in p.children_of(sub):
        ctx_nodes = p.before(t, within=sub)
        context = p.label(ctx_nodes)
        bound_before = p.vars_of(p.before(t)) & sub_vars & p.var(t)
        out.append(CriticalPair(context, p.labels[t], t, bound_before - variables_of(context)))
    return out


def dominates(a: CriticalPair, b: CriticalPair) -> bool:
    """Does passing test ``b`` imply passing test ``a``?

    True when the anchor of ``a`` is inside that of ``b`` and ``a``'s
    extension maps into ``b``'s fixing the anchor of ``a``; then any
    extension found for ``b`` composes into one for ``a``.
    """
    if not a.anchor_vars <= b.anchor_vars:
        return False
    ident = {v: v for v in a.anchor_vars}
    return find_homomorphism(a.extension(), b.extension(), fixed=ident) is not None


def eliminate(pairs: Sequence[CriticalPair]) -> list[CriticalPair]:
    """Drop every pair that some other surviving pair dominates, scanning in the given order."""
    alive = list(pairs)
    for a in list(alive):
        if a not in alive:
            continue
        for b in list(alive):
            if b is a or b not in alive:
                continue
            if dominates(a, b):
                alive.remove(b)
    return alive


def critical_subtrees(p: PatternTree, sub: Subtree, order: Sequence[int] | None = None) -> list[CriticalPair]:
    """Surviving child tests of ``sub``.  ``order`` overrides the scan order of children."""
    pairs = child_pairs(p, sub)
    if order is not None:
        rank = {t: i for i, t in enumerate(order)}
        pairs.sort(key=lambda c: rank[c.child])
    return eliminate(pairs)


def uncovered_children(p: PatternTree, sub: Subtree, survivors: Sequence[CriticalPair]) -> list[int]:
    """Children whose test is neither kept nor implied by a kept one (should be empty)."""
    out = []
    for c in child_pairs(p, sub):
        if c in survivors:
            continue
        if not any(dominates(s, c) for s in survivors):
            out.append(c.child)
    return out


def iter_csts(p: PatternTree, subtree_cap: int = DEFAULT_SUBTREE_CAP) -> Iterator[tuple[Subtree, CriticalPair]]:
    count = p.subtree_count()
    if count > subtree_cap:
        raise CapExceeded(f"{count} root subtrees exceed the cap of {subtree_cap}", count)
    for sub in p.root_subtrees():
        for pair in critical_subtrees(p, sub):
            yield sub, pair


def csts_all(p: PatternTree, subtree_cap: int = DEFAULT_SUBTREE_CAP) -> set[CriticalPair]:
    return {pair for _, pair in iter_csts(p, subtree_cap)}


def extcore_width(pair: CriticalPair) -> tuple[int, bool]:
    """Treewidth of the pair's extension core and whether it is exact."""
    g = gaifman_graph(extension_core(pair.pair()))
    if len(g.vertices) <= DEFAULT_VERTEX_LIMIT:
        return treewidth_exact(g).width, True
    return treewidth_upper(g).width, False


def eval_projection_free(p: PatternTree, db: Structure, mu: Mapping,
                         width_budget: int = DEFAULT_WIDTH_BUDGET) -> bool:
    """Is ``mu`` an answer?  Checks the pp-solution, then runs only the critical child tests."""
    if not is_projection_free(p):
        raise ValueError("pattern tree has existential variables")
    sub = pp_solution_subtree(p, db, mu)
    if sub is None:
        return False
    for pair in critical_subtrees(p, sub):
        inst = ExtInstance(pair.pair(), db, {v: mu[v] for v in pair.anchor_vars})
        if decide_ext(inst, width_budget):
            return False
    return True
