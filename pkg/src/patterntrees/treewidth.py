"""Tree decompositions: exact branch and bound over elimination orderings and a min-fill heuristic."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from .errors import InvalidDecomposition, VertexLimit
from .relational import Graph, elem_key, sorted_elems

DEFAULT_VERTEX_LIMIT = 24


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed ``0..k-1``; ``parent[i]`` is the parent bag (``None`` for the root).

    ``width`` is the largest bag size minus one, so a decomposition of the
    empty graph (a single empty bag) has width ``-1``.
    """

    bags: tuple[frozenset, ...]
    parent: tuple[int | None, ...]

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    @property
    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p is not None:
                ch[p].append(i)
        return ch

    @property
    def root(self) -> int:
        return self.parent.index(None)

    def problems(self, g: Graph) -> list[str]:
        """Violated decomposition conditions for ``g`` (empty when valid)."""
        out = []
        if not self.bags:
            return ["no bags"]
        if sum(p is None for p in self.parent) != 1:
            out.append("bag tree must have exactly one root")
        # parent pointers must form a tree reachable from the root
        seen, stack = set(), [self.root] if None in self.parent else []
        ch = self.children
        while stack:
            i = stack.pop()
            if i in seen:
                out.append("cycle in bag tree")
                break
            seen.add(i)
            stack.extend(ch[i])
        if len(seen) != len(self.bags):
            out.append("bag tree is not connected")
        covered = set().union(*self.bags)
        missing = g.vertices - covered
        if missing:
            out.append(f"vertices not covered: {sorted_elems(missing)}")
        for e in g.edges:
            if not any(e <= b for b in self.bags):
                out.append(f"edge {sorted_elems(e)} not inside any bag")
        for v in covered:
            holding = {i for i, b in enumerate(self.bags) if v in b}
            # a vertex set is connected in a rooted tree iff exactly one holder has a non-holding parent
            tops = [i for i in holding if self.parent[i] is None or self.parent[i] not in holding]
            if len(tops) != 1:
                out.append(f"bags holding {v} are not connected")
        return out

    def is_valid_for(self, g: Graph) -> bool:
        return not self.problems(g)

    def check(self, g: Graph) -> None:
        problems = self.problems(g)
        if problems:
            raise InvalidDecomposition("; ".join(problems))


def _adjacency(g: Graph) -> dict:
    return {v: set(ns) for v, ns in g.adjacency.items()}


def _eliminate(adj: dict, v: Hashable) -> None:
    nbrs = adj.pop(v)
    for u in nbrs:
        adj[u].discard(v)
        adj[u].update(w for w in nbrs if w != u)


def _fill_in(adj: dict, v: Hashable) -> int:
    ns = list(adj[v])
    missing = 0
    for i, a in enumerate(ns):
        na = adj[a]
        for b in ns[i + 1:]:
            if b not in na:
                missing += 1
    return missing


def decomposition_from_order(g: Graph, order: Sequence) -> TreeDecomposition:
    """Standard elimination-ordering construction; components are chained under one root."""
    if not g.vertices:
        return TreeDecomposition((frozenset(),), (None,))
    pos = {v: i for i, v in enumerate(order)}
    if set(pos) != set(g.vertices):
        raise ValueError("order must list every vertex exactly once")
    adj = _adjacency(g)
    bags, parent_vertex = [], []
    for v in order:
        higher = set(adj[v])
        bags.append(frozenset(higher | {v}))
        parent_vertex.append(min(higher, key=pos.__getitem__) if higher else None)
        _eliminate(adj, v)
    parent: list[int | None] = [pos[u] if u is not None else None for u in parent_vertex]
    roots = [i for i, p in enumerate(parent) if p is None]
    for a, b in zip(roots, roots[1:]):
        parent[a] = b
    return TreeDecomposition(tuple(bags), tuple(parent))


def order_width(g: Graph, order: Sequence) -> int:
    adj = _adjacency(g)
    w = -1 if not order else 0
    for v in order:
        w = max(w, len(adj[v]))
        _eliminate(adj, v)
    return w


def min_fill_order(g: Graph) -> list:
    adj = _adjacency(g)
    order = []
    while adj:
        v = min(adj, key=lambda x: (_fill_in(adj, x), len(adj[x]), elem_key(x)))
        order.append(v)
        _eliminate(adj, v)
    return order


def treewidth_upper(g: Graph) -> TreeDecomposition:
    """Valid decomposition from the min-fill elimination ordering (an upper bound)."""
    return decomposition_from_order(g, min_fill_order(g))


def minor_min_width(adj: dict) -> int:
    """Lower bound: contract a min-degree vertex into its min-degree neighbour, repeatedly."""
    adj = {v: set(ns) for v, ns in adj.items()}
    lb = 0
    while len(adj) > 1:
        v = min(adj, key=lambda x: (len(adj[x]), elem_key(x)))
        lb = max(lb, len(adj[v]))
        if not adj[v]:
            del adj[v]
            continue
        u = min(adj[v], key=lambda x: (len(adj[x]), elem_key(x)))
        for w in adj[v]:
            adj[w].discard(v)
            if w != u:
                adj[w].add(u)
                adj[u].add(w)
        del adj[v]
    return lb


def _simplicial(adj: dict) -> Hashable | None:
    for v in sorted(adj, key=elem_key):
        ns = list(adj[v])
        if all(b in adj[a] for i, a in enumerate(ns) for b in ns[i + 1:]):
            return v
    return None


def treewidth_exact(g: Graph, cap: int | None = None, vertex_limit: int = DEFAULT_VERTEX_LIMIT) -> TreeDecomposition | None:
    """Minimum-width decomposition, or ``None`` when the treewidth exceeds ``cap``.

    Depth-first branch and bound over elimination orderings, seeded with the
    min-fill upper bound and pruned with the minor-min-width lower bound.
    Simplicial vertices are eliminated without branching, and elimination
    prefixes already explored at no larger width are skipped.
    """
    if len(g.vertices) > vertex_limit:
        raise VertexLimit(f"{len(g.vertices)} vertices exceed the exact-treewidth limit of {vertex_limit}")
    if not g.vertices:
        return decomposition_from_order(g, [])
    ub_order = min_fill_order(g)
    ub = order_width(g, ub_order)
    lb = minor_min_width(_adjacency(g))
    if cap is not None and lb > cap:
        return None
    if lb >= ub:
        return decomposition_from_order(g, ub_order)

    best = {"width": ub, "order": ub_order}
    if cap is not None and cap < ub:
        best = {"width": cap + 1, "order": None}
    seen: dict[frozenset, int] = {}

    def search(adj: dict, prefix: list, width: int) -> None:
        adj = {v: set(ns) for v, ns in adj.items()}
        prefix = list(prefix)
        while True:
            if len(adj) - 1 <= width:
                # remaining vertices fit into a single bag of the current width
                if width < best["width"]:
                    best["width"] = width
                    best["order"] = prefix + sorted_elems(adj)
                return
            v = _simplicial(adj)
            if v is None:
                break
            width = max(width, len(adj[v]))
            if width >= best["width"]:
                return
            prefix.append(v)
            _eliminate(adj, v)
        key = frozenset(prefix)
        if seen.get(key, best["width"] + 1) <= width:
            return
        seen[key] = width
        if max(width, minor_min_width(adj)) >= best["width"]:
            return
        for v in sorted(adj, key=lambda x: (_fill_in(adj, x), len(adj[x]), elem_key(x))):
            nw = max(width, len(adj[v]))
            if nw >= best["width"]:
                continue
            child = {u: set(ns) for u, ns in adj.items()}
            _eliminate(child, v)
            search(child, prefix + [v], nw)
            if best["width"] <= lb:
                return

    search(_adjacency(g), [], 0)
    if best["order"] is None:
        return None
    return decomposition_from_order(g, best["order"])


def treewidth(g: Graph, vertex_limit: int = DEFAULT_VERTEX_LIMIT) -> tuple[int, bool, TreeDecomposition]:
    """``(width, exact, decomposition)``: exact when the graph is small enough, else min-fill."""
    if len(g.vertices) <= vertex_limit:
        td = treewidth_exact(g, vertex_limit=vertex_limit)
        return td.width, True, td
    td = treewidth_upper(g)
    return td.width, False, td

