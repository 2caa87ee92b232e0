"""Static tractability report for a pattern tree.

The report is a plain JSON-serializable dict; see the README for the schema.
Every treewidth comes with an ``exact`` flag that is false when it is only
an upper bound (too many vertices for the exact solver, or too many
elements to compute a core).
"""
from __future__ import annotations

from itertools import product

from .cores import ExtensionPair, extension_core
from .csts import DEFAULT_SUBTREE_CAP, CriticalPair, iter_csts
from .errors import CapExceeded, DomainLimit
from .ext import cq_to_ext
from .fpt import InterfaceComponent, cia_symbol, interface_components, prune, relevant_nodes
from .patterns import PatternTree, is_projection_free, is_simple, is_well_designed
from .projection import projection_under_set
from .relational import Atom, Structure, gaifman_graph, sorted_elems, union
from .treewidth import DEFAULT_VERTEX_LIMIT, treewidth_exact, treewidth_upper

DEFAULT_COMBO_CAP = 4096


def _width(s: Structure) -> tuple[int, bool]:
    g = gaifman_graph(s)
    if len(g.vertices) <= DEFAULT_VERTEX_LIMIT:
        return treewidth_exact(g).width, True
    return treewidth_upper(g).width, False


def extcore_treewidth(pair: ExtensionPair) -> tuple[int, bool, Structure | None]:
    """``(width, exact, extension core)``.  Without the core, bound it by the unfolded projection."""
    try:
        ec = extension_core(pair)
    except DomainLimit:
        w, _ = _width(projection_under_set(union(pair.anchor, pair.extension), pair.anchor.domain))
        return w, False, None
    w, exact = _width(ec)
    return w, exact, ec


def _atoms(atoms) -> list[str]:
    return sorted(str(a) for a in atoms)


def _vars(vs) -> list[str]:
    return [str(v) for v in sorted_elems(vs)]


def _component_json(comp: InterfaceComponent, orig: list[int]) -> dict:
    return {
        "node": orig[comp.node],
        "kind": comp.kind,
        "atoms": _atoms(comp.atoms),
        "inherited": _vars(comp.inherited),
        "inherited_plus": _vars(comp.inherited_plus),
    }


def _pair_json(sub, pair: CriticalPair) -> dict:
    return {
        "subtree": sorted(sub),
        "child": pair.child,
        "context": _atoms(pair.context),
        "child_label": _atoms(pair.child_label),
        "pinned": _vars(pair.pinned),
    }


def _verdict(rows: list[dict], c: int) -> bool | None:
    """True if every width is within ``c``; False only if an exact width exceeds it."""
    if all(r["treewidth"] <= c for r in rows):
        return True
    if any(r["treewidth"] > c and r["exact"] for r in rows):
        return False
    return None


def _condition_a(q: PatternTree, orig: list[int], c: int) -> dict:
    rows, worst, exact = [], -1, True
    for t in q.nodes:
        if t == q.root:
            continue
        for comp in interface_components(q, t):
            anchor = Structure(comp.inherited_plus)
            pair = ExtensionPair(anchor, union(anchor, Structure.from_atoms(comp.atoms)))
            w, ex, ec = extcore_treewidth(pair)
            row = _component_json(comp, orig)
            row.update(treewidth=w, exact=ex, extcore=_atoms(ec.atoms()) if ec is not None else None)
            rows.append(row)
            worst, exact = max(worst, w), exact and ex
    bad = [r for r in rows if r["treewidth"] > c]
    return {"holds": _verdict(rows, c), "max_treewidth": worst, "exact": exact,
            "components": rows, "witness": bad[0] if bad else None}


def _condition_b(q: PatternTree, orig: list[int], c: int) -> dict:
    width, witness = 0, None
    for t in q.nodes:
        if t == q.root:
            continue
        for comp in interface_components(q, t):
            if witness is None or len(comp.inherited) > width:
                width, witness = len(comp.inherited), _component_json(comp, orig)
    return {"holds": width <= c, "width": width, "witness": witness}


def _condition_c(q: PatternTree, orig: list[int], c: int, combo_cap: int) -> dict:
    worst, exact, checked, truncated, witness = -1, True, 0, False, None
    proven_violation = False
    for sub in q.root_subtrees():
        kids = q.children_of(sub)
        options = [interface_components(q, t) for t in kids]
        sub_key = "-".join(str(orig[t]) for t in sorted(sub))
        free = sorted_elems(q.fvars_of(sub))
        for combo in product(*options):
            if checked >= combo_cap:
                truncated = True
                break
            checked += 1
            body = set(q.label(sub))
            for k, comp in enumerate(combo):
                body.add(Atom(cia_symbol(sub_key, orig[comp.node], k), tuple(sorted_elems(comp.inherited))))
            w, ex, _ = extcore_treewidth(cq_to_ext(body, free))
            exact = exact and ex
            proven_violation = proven_violation or (w > c and ex)
            if w > worst:
                worst = w
                witness = {"subtree": sorted(orig[t] for t in sub),
                           "components": [_component_json(comp, orig) for comp in combo],
                           "treewidth": w}
        if truncated:
            break
    if proven_violation:
        holds = False
    elif worst > c or truncated:
        holds = None
    else:
        holds = True
    return {"holds": holds, "max_treewidth": worst, "exact": exact, "combinations_checked": checked,
            "truncated": truncated, "witness": witness if worst > c else None, "worst": witness}


def _csts_quantity(p: PatternTree, subtree_cap: int) -> dict:
    try:
        found = list(iter_csts(p, subtree_cap))
    except CapExceeded as e:
        return {"max_treewidth": None, "exact": False, "truncated": True, "subtree_count": e.count, "pairs": []}
    rows, seen, worst, exact = [], set(), -1, True
    for sub, pair in found:
        if pair in seen:
            continue
        seen.add(pair)
        w, ex, _ = extcore_treewidth(pair.pair())
        row = _pair_json(sub, pair)
        row.update(treewidth=w, exact=ex)
        rows.append(row)
        worst, exact = max(worst, w), exact and ex
    return {"max_treewidth": worst, "exact": exact, "truncated": False,
            "subtree_count": p.subtree_count(), "pairs": rows}


def check_conditions(p: PatternTree, c: int = 2, combo_cap: int = DEFAULT_COMBO_CAP,
                     subtree_cap: int = DEFAULT_SUBTREE_CAP) -> dict:
    wd = is_well_designed(p)
    report: dict = {
        "c": c,
        "flags": {"well_designed": wd, "simple": is_simple(p), "projection_free": is_projection_free(p)},
        "nodes": len(p.parents),
        "free_vars": _vars(p.free_vars),
        "dangling_free_vars": _vars(p.free_vars - p.all_vars),
        "relevant_nodes": None,
        "condition_a": None,
        "condition_b": None,
        "condition_c": None,
        "condition_c_unpruned": None,
        "csts": None,
        "notes": [],
    }
    if report["flags"]["projection_free"]:
        report["csts"] = _csts_quantity(p, subtree_cap)
    if not wd:
        report["notes"].append("conditions (a)-(c) are defined for well-designed trees only")
        return report
    report["relevant_nodes"] = sorted(relevant_nodes(p))
    q, orig = prune(p)
    report["condition_a"] = _condition_a(q, orig, c)
    report["condition_b"] = _condition_b(q, orig, c)
    report["condition_c"] = _condition_c(q, orig, c, combo_cap)
    if len(orig) != len(p.parents):
        full = _condition_c(p, list(p.nodes), c, combo_cap)
        if full["max_treewidth"] != report["condition_c"]["max_treewidth"]:
            report["condition_c_unpruned"] = full
    return report
