"""Independent brute-force oracles used only by the tests."""
import itertools

from patterntrees.relational import elem_key, sorted_elems


def all_maps(source_elems, target_elems, fixed=None):
    src = sorted_elems(source_elems)
    tgt = sorted_elems(target_elems)
    fixed = fixed or {}
    free = [e for e in src if e not in fixed]
    for vals in itertools.product(tgt, repeat=len(free)):
        m = dict(fixed)
        m.update(zip(free, vals))
        yield m


def is_hom(m, source, target):
    for sym, tuples in source.relations.items():
        rel = target.relation(sym)
        for tup in tuples:
            if tuple(m[e] for e in tup) not in rel:
                return False
    return all(v in target.domain for v in m.values())


def hom_exists(source, target, fixed=None):
    if fixed and any(v not in target.domain for v in fixed.values()):
        return False
    return any(is_hom(m, source, target) for m in all_maps(source.domain, target.domain, fixed))


def elimination_width(adj, order):
    adj = {v: set(ns) for v, ns in adj.items()}
    width = -1
    for v in order:
        nbrs = adj.pop(v)
        width = max(width, len(nbrs))
        for a in nbrs:
            adj[a] |= nbrs - {a}
            adj[a].discard(v)
    return width


def treewidth_by_permutations(g):
    """Minimum over all elimination orders; only for graphs with at most ~8 vertices."""
    adj = {v: set(ns) for v, ns in g.adjacency.items()}
    if not adj:
        return -1
    vs = sorted(adj, key=elem_key)
    return min(elimination_width(adj, order) for order in itertools.permutations(vs))
