"""Homomorphism search between structures, and conjunctive-query membership.

Two engines decide the same question: :func:`find_homomorphism` is a
backtracking search with forward checking, :func:`hom_via_decomposition`
is dynamic programming over a tree decomposition of the source.  Both
intern elements as integers before searching.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Sequence

from .errors import SymbolMismatch
from .projection import projection_under_hom
from .relational import Atom, Structure, elem_key, gaifman_graph, sorted_elems
from .treewidth import DEFAULT_VERTEX_LIMIT, TreeDecomposition, treewidth_exact, treewidth_upper

DEFAULT_WIDTH_BUDGET = 3


class _Constraint:
    __slots__ = ("scope", "tuples", "_index")

    def __init__(self, scope: tuple[int, ...], tuples: Iterable[tuple[int, ...]]):
        self.scope = scope
        # repeated variables in the scope force equal values at those positions
        first: dict[int, int] = {}
        eqs = []
        for pos, v in enumerate(scope):
            if v in first:
                eqs.append((first[v], pos))
            else:
                first[v] = pos
        self.tuples = [t for t in tuples if all(t[a] == t[b] for a, b in eqs)]
        self._index: dict[tuple[int, ...], dict[tuple, list]] = {}

    def matching(self, positions: tuple[int, ...], values: tuple) -> list:
        idx = self._index.get(positions)
        if idx is None:
            idx = {}
            for t in self.tuples:
                idx.setdefault(tuple(t[p] for p in positions), []).append(t)
            self._index[positions] = idx
        return idx.get(values, ())


class _Problem:
    """Integer-encoded homomorphism problem ``source -> target``."""

    def __init__(self, source: Structure, target: Structure, fixed: Mapping | None, strict: bool):
        self.svars = sorted_elems(source.domain)
        self.sidx = {v: i for i, v in enumerate(self.svars)}
        self.tvals = sorted_elems(target.domain)
        self.tidx = {c: i for i, c in enumerate(self.tvals)}
        self.infeasible = False
        self.constraints: list[_Constraint] = []
        self.by_var: list[list[tuple[_Constraint, list[int]]]] = [[] for _ in self.svars]
        for sym in sorted(source.relations, key=str):
            if sym not in target.relations and strict:
                raise SymbolMismatch(f"symbol {sym} of the source is not interpreted in the target")
            stuples = source.relations[sym]
            ttuples = target.relation(sym)
            if not ttuples:
                self.infeasible = True
                continue
            enc = [tuple(self.tidx[x] for x in t) for t in ttuples]
            for st in sorted(stuples, key=lambda t: [elem_key(x) for x in t]):
                if not st:
                    continue  # 0-ary, present in the target
                c = _Constraint(tuple(self.sidx[x] for x in st), enc)
                if not c.tuples:
                    self.infeasible = True
                self.constraints.append(c)
                for v in set(c.scope):
                    self.by_var[v].append((c, [p for p, u in enumerate(c.scope) if u == v]))
        full = frozenset(range(len(self.tvals)))
        self.domains: list[frozenset] = [full] * len(self.svars)
        for c in self.constraints:
            for v in set(c.scope):
                pos = c.scope.index(v)
                self.domains[v] = self.domains[v] & {t[pos] for t in c.tuples}
        for v, c in (fixed or {}).items():
            if v not in self.sidx:
                continue
            i = self.sidx[v]
            if c not in self.tidx or self.tidx[c] not in self.domains[i]:
                self.infeasible = True
            else:
                self.domains[i] = frozenset((self.tidx[c],))
        if any(not d for d in self.domains):
            self.infeasible = True

    def decode(self, assignment: Sequence[int]) -> dict:
        return {v: self.tvals[a] for v, a in zip(self.svars, assignment)}

    def _revise(self, domains: list, assign: list, v: int) -> list | None:
        """Forward checking after assigning ``v``; returns new domains or ``None`` on a wipe-out."""
        domains = list(domains)
        for c, _ in self.by_var[v]:
            bound = tuple(p for p, u in enumerate(c.scope) if assign[u] is not None)
            rows = c.matching(bound, tuple(assign[c.scope[p]] for p in bound))
            if not rows:
                return None
            for p, u in enumerate(c.scope):
                if assign[u] is not None:
                    continue
                allowed = {t[p] for t in rows}
                nd = domains[u] & allowed
                if not nd:
                    return None
                domains[u] = nd
        return domains

    def solutions(self, injective: bool = False, variables: Sequence[int] | None = None) -> Iterator[list[int]]:
        """All assignments (over ``variables``, default every source element), deterministically ordered."""
        if self.infeasible:
            return
        todo = set(range(len(self.svars)) if variables is None else variables)
        assign: list[int | None] = [None] * len(self.svars)
        used: set[int] = set()

        def rec(domains: list) -> Iterator[list[int]]:
            open_vars = [u for u in todo if assign[u] is None]
            if not open_vars:
                yield list(assign)
                return
            v = min(open_vars, key=lambda u: (len(domains[u]), u))
            for val in sorted(domains[v]):
                if injective and val in used:
                    continue
                assign[v] = val
                used.add(val)
                nd = self._revise(domains, assign, v)
                if nd is not None:
                    yield from rec(nd)
                assign[v] = None
                used.discard(val)

        yield from rec(list(self.domains))


def iter_homomorphisms(source: Structure, target: Structure, fixed: Mapping | None = None,
                       strict: bool = False, injective: bool = False) -> Iterator[dict]:
    prob = _Problem(source, target, fixed, strict)
    for sol in prob.solutions(injective=injective):
        yield prob.decode(sol)


def find_homomorphism(source: Structure, target: Structure, fixed: Mapping | None = None,
                      strict: bool = False) -> dict | None:
    """A homomorphism ``source -> target`` extending ``fixed``, or ``None``.

    Variables are chosen smallest-domain first with ties broken by element
    order, values in element order, so the result is deterministic.  A source
    symbol missing from the target counts as an empty relation unless
    ``strict`` is set, in which case :class:`SymbolMismatch` is raised.
    """
    return next(iter_homomorphisms(source, target, fixed, strict), None)


def hom_via_decomposition(source: Structure, td: TreeDecomposition, target: Structure,
                          fixed: Mapping | None = None, strict: bool = False) -> dict | None:
    td.check(gaifman_graph(source))
    prob = _Problem(source, target, fixed, strict)
    if prob.infeasible:
        return None
    bags = [sorted(prob.sidx[v] for v in bag if v in prob.sidx) for bag in td.bags]

    tables: list[list[tuple]] = []
    for bag in bags:
        sub = _bag_problem(prob, bag)
        if sub is None:
            return None
        rows = [tuple(sol[v] for v in bag) for sol in sub.solutions(variables=bag)]
        if not rows:
            return None
        tables.append(rows)

    children = td.children
    order = _postorder(td.root, children)
    for b in order:
        for c in children[b]:
            shared = [v for v in bags[b] if v in set(bags[c])]
            cpos = [bags[c].index(v) for v in shared]
            bpos = [bags[b].index(v) for v in shared]
            keys = {tuple(r[p] for p in cpos) for r in tables[c]}
            tables[b] = [r for r in tables[b] if tuple(r[p] for p in bpos) in keys]
            if not tables[b]:
                return None

    assign: list[int | None] = [None] * len(prob.svars)
    for b in reversed(order):
        row = next(r for r in tables[b] if all(assign[v] is None or assign[v] == r[i] for i, v in enumerate(bags[b])))
        for i, v in enumerate(bags[b]):
            assign[v] = row[i]
    for v, a in enumerate(assign):
        if a is None:  # element outside every bag: unconstrained
            if not prob.domains[v]:
                return None
            assign[v] = min(prob.domains[v])
    return prob.decode(assign)


def _postorder(root: int, children: list[list[int]]) -> list[int]:
    out, stack = [], [(root, False)]
    while stack:
        b, done = stack.pop()
        if done:
            out.append(b)
            continue
        stack.append((b, True))
        stack.extend((c, False) for c in reversed(children[b]))
    return out


def _bag_problem(prob: _Problem, bag: list[int]) -> _Problem | None:
    """The restriction of ``prob`` to ``bag``: every constraint projected onto the bag's variables."""
    inbag = set(bag)
    sub = _Problem.__new__(_Problem)
    sub.svars, sub.sidx, sub.tvals, sub.tidx = prob.svars, prob.sidx, prob.tvals, prob.tidx
    sub.infeasible = False
    sub.constraints = []
    sub.by_var = [[] for _ in prob.svars]
    sub.domains = list(prob.domains)
    seen = set()
    for c in prob.constraints:
        keep = [p for p, v in enumerate(c.scope) if v in inbag]
        if not keep:
            continue
        scope = tuple(c.scope[p] for p in keep)
        tuples = frozenset(tuple(t[p] for p in keep) for t in c.tuples)
        key = (scope, tuples)
        if key in seen:
            continue
        seen.add(key)
        pc = _Constraint(scope, tuples)
        if not pc.tuples:
            return None
        sub.constraints.append(pc)
        for v in set(scope):
            sub.by_var[v].append((pc, [p for p, u in enumerate(scope) if u == v]))
    return sub


def decomposition_for(s: Structure, width_budget: int, vertex_limit: int = DEFAULT_VERTEX_LIMIT) -> TreeDecomposition | None:
    """A decomposition of ``s`` of width at most ``width_budget``, if one is found."""
    g = gaifman_graph(s)
    if len(g.vertices) <= vertex_limit:
        return treewidth_exact(g, cap=width_budget, vertex_limit=vertex_limit)
    td = treewidth_upper(g)
    return td if td.width <= width_budget else None


def evaluate_cq(body: Iterable[Atom], free: Sequence, db: Structure, binding: Mapping,
                width_budget: int = DEFAULT_WIDTH_BUDGET) -> bool:
    """Is ``binding(free)`` in the answer of ``Ans(free) <- body`` over ``db``?

    The binding is pushed into the query by projection; the residual
    homomorphism problem goes to the decomposition engine when its
    treewidth is within ``width_budget``, otherwise to backtracking.
    """
    query = Structure.from_atoms(body, domain=free)
    h = {v: binding[v] for v in free}
    if any(c not in db.domain for c in h.values()):
        return False
    q_prime, d_prime = projection_under_hom(query, db, h)
    td = decomposition_for(q_prime, width_budget)
    if td is not None:
        return hom_via_decomposition(q_prime, td, d_prime) is not None
    return find_homomorphism(q_prime, d_prime) is not None
