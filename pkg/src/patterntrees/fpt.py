"""Evaluation of well-designed pattern trees with projection.

The answer test for a mapping mu guesses a subtree T' whose free variables
are exactly dom(mu).  For each child of T' it then picks one interface
component.  Each component becomes a fresh "component interface" atom over
its inherited (existential interface) variables.  The atom's relation holds
exactly the assignments from which the component can NOT be extended
(the stop set).  mu is an answer iff, for some choice, the conjunctive
query over T' plus those atoms accepts mu(fvar(T')).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from .errors import NotWellDesigned, RootHasNoParent, WidthCapExceeded
from .ext import extension_exists
from .homomorphism import DEFAULT_WIDTH_BUDGET
from .patterns import PatternTree, Subtree, is_well_designed
from .relational import Atom, Structure, Symbol, elem_key, gaifman_graph, sorted_elems, variables_of

CIA_PREFIX = "__cia"


@dataclass(frozen=True)
class InterfaceComponent:
    node: int
    atoms: frozenset
    kind: str  # "type1" or "type2"
    inherited: frozenset
    inherited_plus: frozenset

    def sort_key(self):
        return (self.kind, sorted(str(a) for a in self.atoms))


def relevant_nodes(p: PatternTree) -> frozenset:
    """Nodes whose subtree introduces a free variable not already bound above them; the root is always kept."""
    out = {p.root}
    for t in p.nodes:
        below = p.fvars_of(p.descendants(t))
        above = p.fvars_of(p.branch(t))
        if below - above:
            out.add(t)
    return frozenset(out)


def prune(p: PatternTree) -> tuple[PatternTree, list[int]]:
    """Remove irrelevant nodes.  Relevant nodes are closed under parents, so the result is a tree."""
    return p.induced(relevant_nodes(p))


def s_components(atoms: Iterable[Atom], s: Iterable) -> list[frozenset]:
    """Atoms grouped by the connected components of their Gaifman graph after removing ``s``.

    Atoms whose variables all lie in ``s`` belong to no component.
    """
    atoms = list(atoms)
    s = frozenset(s)
    g = gaifman_graph(atoms)
    rest = [v for v in sorted_elems(g.vertices) if v not in s]
    comp_of: dict = {}
    for v in rest:
        if v in comp_of:
            continue
        comp_of[v] = v
        stack = [v]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if w not in s and w not in comp_of:
                    comp_of[w] = v
                    stack.append(w)
    groups: dict = {}
    for a in atoms:
        outside = [x for x in a.args if x not in s]
        if outside:
            groups.setdefault(comp_of[outside[0]], set()).add(a)
    return [frozenset(groups[k]) for k in sorted(groups, key=elem_key)]


def interface(p: PatternTree, t: int) -> frozenset:
    parent = p.parents[t]
    if parent is None:
        raise RootHasNoParent("the root has no interface")
    return p.var(t) & p.var(parent)


def interface_components(p: PatternTree, t: int) -> list[InterfaceComponent]:
    iface = interface(p, t)
    parent_free = p.var(p.parents[t]) & p.free_vars
    comps = [(frozenset((a,)), "type1") for a in p.labels[t] if a.variables <= iface]
    comps += [(c, "type2") for c in s_components(p.labels[t], iface)]
    out = []
    for atoms, kind in comps:
        vs = variables_of(atoms)
        inherited = (iface & vs) - p.free_vars
        out.append(InterfaceComponent(t, atoms, kind, inherited, inherited | (parent_free & vs)))
    return sorted(out, key=InterfaceComponent.sort_key)


def stop_set(p: PatternTree, comp: InterfaceComponent, db: Structure, mu: Mapping,
             width_cap: int | None = None, width_budget: int = DEFAULT_WIDTH_BUDGET) -> list[dict]:
    """Assignments of the inherited variables from which the component cannot be extended.

    ``nu`` is in the result iff no extension of ``nu`` together with the
    bindings ``mu`` has on the component's variables maps the component into ``db``.
    """
    inherited = sorted_elems(comp.inherited)
    if width_cap is not None and len(inherited) > width_cap:
        raise WidthCapExceeded(f"{len(inherited)} inherited variables exceed the cap of {width_cap}")
    vs = variables_of(comp.atoms)
    bound = {v: c for v, c in mu.items() if v in vs}
    anchor = frozenset(inherited) | frozenset(bound)
    body = Structure.from_atoms(comp.atoms)
    out = []
    for vals in product(sorted_elems(db.domain), repeat=len(inherited)):
        nu = dict(zip(inherited, vals))
        if not extension_exists(anchor, body, db, {**bound, **nu}, width_budget):
            out.append(nu)
    return out


def cia_symbol(sub_key: str, t: int, k: int) -> Symbol:
    return Symbol(f"{CIA_PREFIX}[{sub_key}|{t}|{k}]")


@dataclass
class FptTrace:
    """What the evaluator did, for debugging and tests."""

    subtree: tuple | None = None
    combination: tuple | None = None
    databases: list | None = None


def eval_fpt(p: PatternTree, db: Structure, mu: Mapping, width_budget: int = DEFAULT_WIDTH_BUDGET,
             prune_irrelevant: bool = True, width_cap: int | None = None, trace: FptTrace | None = None) -> bool:
    """Is ``mu`` an answer of the well-designed tree ``p`` over ``db``?"""
    if not is_well_designed(p):
        raise NotWellDesigned("evaluation with projection needs a well-designed pattern tree")
    if not set(mu) <= p.free_vars:
        raise ValueError("mapping binds variables outside the free variables")
    if any(c not in db.domain for c in mu.values()):
        return False
    if prune_irrelevant:
        q, orig = prune(p)
    else:
        q, orig = p, list(p.nodes)
    dom = set(mu)
    memo: dict = {}
    for sub in q.root_subtrees():
        if q.fvars_of(sub) != dom:
            continue
        kids = q.children_of(sub)
        options = [interface_components(q, t) for t in kids]
        sub_key = "-".join(str(orig[t]) for t in sorted(sub))
        for combo in product(*options):
            body = set(q.label(sub))
            extra: dict[Symbol, list] = {}
            for k, comp in enumerate(combo):
                inherited = tuple(sorted_elems(comp.inherited))
                sym = cia_symbol(sub_key, orig[comp.node], k)
                body.add(Atom(sym, inherited))
                key = (comp, frozenset((v, c) for v, c in mu.items() if v in variables_of(comp.atoms)))
                if key not in memo:
                    memo[key] = stop_set(q, comp, db, mu, width_cap, width_budget)
                extra[sym] = [tuple(nu[v] for v in inherited) for nu in memo[key]]
            d_prime = Structure(db.domain, {**db.relations, **extra})
            if trace is not None and trace.databases is not None:
                trace.databases.append(d_prime)
            free = q.fvars_of(sub)
            if extension_exists(free, Structure.from_atoms(body, domain=free), d_prime, mu, width_budget):
                if trace is not None:
                    trace.subtree = tuple(sorted(orig[t] for t in sub))
                    trace.combination = combo
                return True
    return False
