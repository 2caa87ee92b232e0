"""Pattern trees: the data model, classification predicates, pp-solutions and
the brute-force reference semantics.

Nodes are integers ``0..n-1``; ``parents[i]`` is the parent of node ``i``
(``None`` for the root) and siblings are ordered by node id.  The order
``prec`` is the depth-first, left-to-right preorder.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExceeded
from .relational import Atom, Structure, Var, elem_key, sorted_elems, variables_of

Subtree = frozenset  # root-containing connected node set


@dataclass(frozen=True)
class PatternTree:
    parents: tuple
    labels: tuple  # tuple of frozenset[Atom], indexed by node
    free_vars: frozenset

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "labels", tuple(frozenset(l) for l in self.labels))
        object.__setattr__(self, "free_vars", frozenset(self.free_vars))
        n = len(self.parents)
        if n == 0 or len(self.labels) != n:
            raise ValueError("a pattern tree needs at least one node and one label per node")
        roots = [i for i, p in enumerate(self.parents) if p is None]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root, found {len(roots)}")
        for i, p in enumerate(self.parents):
            if p is not None and not (0 <= p < n and p != i):
                raise ValueError(f"node {i} has invalid parent {p}")
        if len(self.preorder) != n:
            raise ValueError("parent pointers do not form a tree")
        for lab in self.labels:
            for a in lab:
                if any(not isinstance(x, Var) for x in a.args):
                    raise ValueError(f"atom {a} contains a constant; query atoms must use variables only")

    @classmethod
    def build(cls, nodes: Sequence[tuple[int | None, Iterable[Atom]]], free: Iterable[Var] | None = None) -> PatternTree:
        """``nodes`` lists ``(parent, atoms)`` pairs; ``free=None`` makes every variable free."""
        labels = [frozenset(atoms) for _, atoms in nodes]
        if free is None:
            free = variables_of(a for l in labels for a in l)
        return cls(tuple(p for p, _ in nodes), tuple(labels), frozenset(free))

    # -- tree structure ---------------------------------------------------

    @cached_property
    def root(self) -> int:
        return self.parents.index(None)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in self.parents]
        for i, p in enumerate(self.parents):
            if p is not None:
                ch[p].append(i)
        return tuple(tuple(c) for c in ch)

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        out, stack, seen = [], [self.root], set()
        while stack:
            t = stack.pop()
            if t in seen:
                break
            seen.add(t)
            out.append(t)
            stack.extend(reversed(self.children[t]))
        return tuple(out)

    @cached_property
    def rank(self) -> dict[int, int]:
        return {t: i for i, t in enumerate(self.preorder)}

    @property
    def nodes(self) -> range:
        return range(len(self.parents))

    def descendants(self, t: int) -> frozenset:
        """Nodes of the subtree rooted at ``t``, including ``t``."""
        out, stack = set(), [t]
        while stack:
            u = stack.pop()
            out.add(u)
            stack.extend(self.children[u])
        return frozenset(out)

    def branch(self, t: int) -> list[int]:
        """Proper ancestors of ``t``, root first."""
        out, p = [], self.parents[t]
        while p is not None:
            out.append(p)
            p = self.parents[p]
        return out[::-1]

    def before(self, t: int, within: Iterable[int] | None = None) -> list[int]:
        pool = self.nodes if within is None else within
        return sorted((s for s in pool if self.rank[s] < self.rank[t]), key=self.rank.__getitem__)

    def children_of(self, sub: Iterable[int]) -> list[int]:
        """``ch(T')``: nodes outside ``sub`` whose parent is in ``sub``, in order."""
        sub = frozenset(sub)
        out = [c for t in sub for c in self.children[t] if c not in sub]
        return sorted(out, key=self.rank.__getitem__)

    def is_subtree(self, sub: Iterable[int]) -> bool:
        sub = frozenset(sub)
        return self.root in sub and all(self.parents[t] in sub for t in sub if t != self.root)

    # -- labels and variables ---------------------------------------------

    def label(self, nodes: Iterable[int]) -> frozenset:
        return frozenset(a for t in nodes for a in self.labels[t])

    def var(self, t: int) -> frozenset:
        return variables_of(self.labels[t])

    def vars_of(self, nodes: Iterable[int]) -> frozenset:
        return frozenset(v for t in nodes for v in self.var(t))

    def fvars_of(self, nodes: Iterable[int]) -> frozenset:
        return self.vars_of(nodes) & self.free_vars

    @cached_property
    def all_vars(self) -> frozenset:
        return self.vars_of(self.nodes)

    # -- subtrees -----------------------------------------------------------

    def subtree_count(self) -> int:
        def f(t: int) -> int:
            n = 1
            for c in self.children[t]:
                n *= 1 + f(c)
            return n
        return f(self.root)

    def root_subtrees(self) -> Iterator[Subtree]:
        """Every connected node set containing the root, by recursive child-inclusion choice."""
        def expand(t: int) -> list[frozenset]:
            options = [frozenset((t,))]
            for c in self.children[t]:
                sub = expand(c)
                options = options + [o | s for o in options for s in sub]
            return options
        yield from sorted(expand(self.root), key=lambda s: (len(s), sorted(self.rank[t] for t in s)))

    def induced(self, keep: Iterable[int]) -> tuple[PatternTree, list[int]]:
        """The tree on the root-connected node set ``keep``; also returns the original id of each new node."""
        keep = frozenset(keep)
        if not self.is_subtree(keep):
            raise ValueError("kept nodes must form a subtree containing the root")
        orig = [t for t in self.preorder if t in keep]
        new_id = {t: i for i, t in enumerate(orig)}
        parents = [None if self.parents[t] is None else new_id[self.parents[t]] for t in orig]
        labels = [self.labels[t] for t in orig]
        return PatternTree(tuple(parents), tuple(labels), self.free_vars), orig

    def __str__(self) -> str:
        lines = []

        def show(t: int, depth: int) -> None:
            atoms = ", ".join(str(a) for a in sorted(self.labels[t], key=str))
            lines.append(f"{'  ' * depth}[{t}] {{{atoms}}}")
            for c in self.children[t]:
                show(c, depth + 1)

        show(self.root, 0)
        free = ", ".join(str(v) for v in sorted_elems(self.free_vars))
        return f"free {{{free}}}\n" + "\n".join(lines)


# -- classification -------------------------------------------------------

def is_well_designed(p: PatternTree) -> bool:
    """Does every variable occur in a connected set of nodes?"""
    for v in p.all_vars:
        holding = {t for t in p.nodes if v in p.var(t)}
        tops = [t for t in holding if p.parents[t] not in holding]
        if len(tops) != 1:
            return False
    return True


def is_simple(p: PatternTree) -> bool:
    seen = set()
    for t in p.nodes:
        for a in p.labels[t]:
            if a.symbol in seen:
                return False
            seen.add(a.symbol)
    return True


def is_projection_free(p: PatternTree) -> bool:
    return p.free_vars == p.all_vars


# -- pp-solutions ---------------------------------------------------------

def maps_into(atoms: Iterable[Atom], db: Structure, mu: Mapping) -> bool:
    return all(tuple(mu[x] for x in a.args) in db.relation(a.symbol) for a in atoms)


def pp_solution_subtree(p: PatternTree, db: Structure, mu: Mapping) -> Subtree | None:
    """The subtree witnessing ``mu`` as a pp-solution, or ``None``.

    Collects the nodes whose variables are all bound and whose atoms map
    into ``db``, grows the root's component inside that set, and accepts
    when its variables are exactly ``dom(mu)``.
    """
    dom = set(mu)
    good = {t for t in p.nodes if p.var(t) <= dom and maps_into(p.labels[t], db, mu)}
    if p.root not in good:
        return None
    sub, stack = set(), [p.root]
    while stack:
        t = stack.pop()
        sub.add(t)
        stack.extend(c for c in p.children[t] if c in good)
    if p.vars_of(sub) != dom:
        return None
    return frozenset(sub)


def restrict_before(p: PatternTree, mu: Mapping, t: int) -> dict:
    keep = p.vars_of(p.before(t))
    return {v: c for v, c in mu.items() if v in keep}


# -- reference semantics --------------------------------------------------

def _join(atoms: Sequence[Atom], db: Structure, binding: dict) -> Iterator[dict]:
    """Nested-loop join: every extension of ``binding`` mapping ``atoms`` into ``db``."""
    if not atoms:
        yield dict(binding)
        return
    # most-bound atom first keeps the loops short
    i = max(range(len(atoms)), key=lambda k: (sum(x in binding for x in atoms[k].args), -k))
    a, rest = atoms[i], atoms[:i] + atoms[i + 1:]
    for tup in sorted(db.relation(a.symbol), key=lambda t: [elem_key(x) for x in t]):
        if len(tup) != len(a.args):
            continue
        new = dict(binding)
        ok = True
        for x, c in zip(a.args, tup):
            if new.setdefault(x, c) != c:
                ok = False
                break
        if ok:
            yield from _join(rest, db, new)


def _sorted_atoms(atoms: Iterable[Atom]) -> list[Atom]:
    return sorted(atoms, key=lambda a: (str(a.symbol), [elem_key(x) for x in a.args]))


def _extendable(p: PatternTree, db: Structure, nu: Mapping, child: int) -> bool:
    ctx = p.vars_of(p.before(child))
    fixed = {v: c for v, c in nu.items() if v in ctx}
    return next(_join(_sorted_atoms(p.labels[child]), db, fixed), None) is not None


def maximal_solutions(p: PatternTree, db: Structure, fixed: Mapping | None = None) -> Iterator[tuple[Subtree, dict]]:
    """``(T_nu, nu)`` for every nu in the answer of the projection-free companion.

    With ``fixed`` given, only subtrees whose free variables are exactly
    ``dom(fixed)`` are enumerated and ``nu`` must extend ``fixed``.
    """
    for sub in p.root_subtrees():
        if fixed is not None and p.fvars_of(sub) != set(fixed):
            continue
        kids = p.children_of(sub)
        for nu in _join(_sorted_atoms(p.label(sub)), db, dict(fixed or {})):
            if pp_solution_subtree(p, db, nu) != sub:
                continue
            if any(_extendable(p, db, nu, c) for c in kids):
                continue
            yield sub, nu


def is_solution_bruteforce(p: PatternTree, db: Structure, mu: Mapping) -> bool:
    if not set(mu) <= p.free_vars:
        raise ValueError("mapping binds variables outside the free variables")
    return next(maximal_solutions(p, db, mu), None) is not None


def all_solutions_bruteforce(p: PatternTree, db: Structure, max_vars: int = 10, max_consts: int = 8) -> list[dict]:
    """The full answer set, sorted; exponential, for testing only."""
    if len(p.all_vars) > max_vars or len(db.domain) > max_consts:
        raise BudgetExceeded(
            f"oracle budget is {max_vars} variables and {max_consts} constants, "
            f"got {len(p.all_vars)} and {len(db.domain)}")
    seen = {}
    for _, nu in maximal_solutions(p, db):
        ans = {v: c for v, c in nu.items() if v in p.free_vars}
        seen[frozenset(ans.items())] = ans
    return sorted(seen.values(), key=mapping_key)


def mapping_key(mu: Mapping) -> list:
    return [(elem_key(v), elem_key(c)) for v, c in sorted(mu.items(), key=lambda kv: elem_key(kv[0]))]


def all_candidate_mappings(p: PatternTree, db: Structure) -> Iterator[dict]:
    """Every partial mapping from free variables into the domain (for exhaustive comparisons)."""
    free = sorted_elems(p.free_vars)
    consts = sorted_elems(db.domain)
    for mask in product((False, True), repeat=len(free)):
        chosen = [v for v, m in zip(free, mask) if m]
        for vals in product(consts, repeat=len(chosen)):
            yield dict(zip(chosen, vals))
