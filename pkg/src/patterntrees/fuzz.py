"""Random instance generators and the differential harness.

All randomness flows through a ``random.Random`` seeded by the caller, so a
(seed, knobs) pair always reproduces the same instances.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Callable

from .csts import eval_projection_free
from .errors import BudgetExceeded
from .fpt import eval_fpt
from .patterns import (PatternTree, _join, all_solutions_bruteforce, is_projection_free, is_solution_bruteforce,
                       is_well_designed, pp_solution_subtree)
from .relational import Atom, Const, Structure, Symbol, Var, sorted_elems


@dataclass(frozen=True)
class FuzzConfig:
    max_nodes: int = 4
    max_atoms: int = 3
    max_arity: int = 3
    max_vars: int = 6
    domain: int = 5
    density: float = 0.5
    kind: str = "mixed"  # projection_free | well_designed | simple | mixed


@dataclass
class Divergence:
    trial: int
    kind: str
    tree: PatternTree
    db: Structure
    mu: dict
    expected: bool
    got: bool
    engine: str


@dataclass
class FuzzResult:
    trials: int = 0
    divergences: list = field(default_factory=list)
    minimized: Divergence | None = None
    counts: dict = field(default_factory=dict)


# -- generators -------------------------------------------------------------

def random_tree(rng: random.Random, cfg: FuzzConfig, well_designed: bool = True, simple: bool = False,
                projection_free: bool = False) -> PatternTree:
    """Random pattern tree within the size knobs.

    Well-designed trees draw each child's variables from its parent's
    variables plus fresh ones, which keeps every occurrence set connected.
    """
    n_nodes = rng.randint(1, cfg.max_nodes)
    parents = [None] + [rng.randrange(i) for i in range(1, n_nodes)]
    pool = [Var(f"v{i}") for i in range(cfg.max_vars)]
    fresh = list(pool)
    rng.shuffle(fresh)
    symbols: dict[str, int] = {}
    shared_syms = [f"s{i}" for i in range(3)]
    labels: list[list[Atom]] = []
    node_vars: list[set] = []
    for t in range(n_nodes):
        if well_designed:
            inherited = sorted_elems(node_vars[parents[t]]) if t else []
            k_new = rng.randint(1 if inherited else 2, 3)
            new = [fresh.pop() for _ in range(min(k_new, len(fresh)))]
            avail = inherited + new
            if not avail:
                avail = inherited or pool[:1]
        else:
            # a small shared pool makes variables recur in unrelated nodes
            avail = rng.sample(pool[:rng.randint(2, len(pool))], 2) + rng.sample(pool, 1)
        atoms = []
        for _ in range(rng.randint(1, cfg.max_atoms)):
            if simple:
                name = f"r{len(symbols)}"
            else:
                name = rng.choice(shared_syms + [f"r{len(symbols)}"])
            arity = symbols.get(name)
            if arity is None:
                arity = rng.randint(1, cfg.max_arity)
                symbols[name] = arity
            atoms.append(Atom(Symbol(name), tuple(rng.choice(avail) for _ in range(arity))))
        # make sure fresh variables actually occur, otherwise they would leak into siblings later
        used = {v for a in atoms for v in a.args}
        if well_designed:
            for v in avail:
                if v not in used and v not in (node_vars[parents[t]] if t else set()):
                    fresh.append(v)
        labels.append(atoms)
        node_vars.append(used)
    tree = PatternTree(tuple(parents), tuple(frozenset(l) for l in labels), frozenset())
    all_vars = sorted_elems(tree.all_vars)
    if projection_free:
        free = set(all_vars)
    else:
        free = {v for v in all_vars if rng.random() < 0.5}
        if free == set(all_vars) and len(all_vars) > 1:
            free.discard(rng.choice(all_vars))
    return PatternTree(tree.parents, tree.labels, frozenset(free))


def random_db(rng: random.Random, tree: PatternTree, cfg: FuzzConfig) -> Structure:
    consts = [Const(f"c{i}") for i in range(rng.randint(min(2, cfg.domain), cfg.domain))]
    arities = {a.symbol: len(a.args) for lab in tree.labels for a in lab}
    rels = {}
    for sym, k in sorted(arities.items(), key=lambda kv: str(kv[0])):
        density = cfg.density if k < 3 else cfg.density / 2
        rels[sym] = {t for t in product(consts, repeat=k) if rng.random() < density}
    return Structure(consts, rels)


def pp_solutions(tree: PatternTree, db: Structure, limit: int = 200) -> dict:
    """pp-solutions grouped by their subtree, up to ``limit`` per subtree, maximal or not."""
    out = {}
    for sub in tree.root_subtrees():
        found = []
        for nu in _join(sorted(tree.label(sub), key=str), db, {}):
            if pp_solution_subtree(tree, db, nu) == sub:
                found.append(nu)
                if len(found) >= limit:
                    break
        if found:
            out[sub] = found
    return out


def random_mapping(rng: random.Random, tree: PatternTree, db: Structure) -> dict:
    """A true answer, a projected pp-solution, a near miss, or a random partial binding."""
    consts = sorted_elems(db.domain)
    roll = rng.random()
    if roll < 0.25:
        pps = pp_solutions(tree, db)
        if pps:
            # pick the subtree first so small subtrees, which are rarely maximal, are not drowned out
            nu = rng.choice(pps[rng.choice(list(pps))])
            return {v: c for v, c in nu.items() if v in tree.free_vars}
    if roll < 0.75:
        try:
            answers = all_solutions_bruteforce(tree, db)
        except BudgetExceeded:
            answers = []
        if answers:
            mu = dict(rng.choice(answers))
            if roll < 0.5 or not mu:
                return mu
            v = rng.choice(sorted_elems(mu))
            if rng.random() < 0.5:
                del mu[v]
            else:
                mu[v] = rng.choice(consts)
            return mu
    return {v: rng.choice(consts) for v in sorted_elems(tree.free_vars) if rng.random() < 0.7}


def random_structure(rng: random.Random, n_elems: int, symbols: dict[str, int], density: float,
                     prefix: str = "?") -> Structure:
    """Random structure over ``n_elems`` elements (variables when ``prefix`` is ``?``)."""
    make = (lambda i: Var(f"e{i}")) if prefix == "?" else (lambda i: Const(f"{prefix}{i}"))
    elems = [make(i) for i in range(n_elems)]
    rels = {}
    for name, k in symbols.items():
        rels[Symbol(name)] = {t for t in product(elems, repeat=k) if rng.random() < density}
    return Structure(elems, rels)


# -- engines --------------------------------------------------------------

def auto_engine(tree: PatternTree) -> str:
    if is_projection_free(tree):
        return "csts"
    if is_well_designed(tree):
        return "fpt"
    return "brute"


def run_engine(name: str, tree: PatternTree, db: Structure, mu: dict, **kw) -> bool:
    if name == "auto":
        name = auto_engine(tree)
    if name == "csts":
        return eval_projection_free(tree, db, mu, **kw)
    if name == "fpt":
        return eval_fpt(tree, db, mu, **kw)
    if name == "brute":
        return is_solution_bruteforce(tree, db, mu)
    raise ValueError(f"unknown engine {name!r}")


def applicable(engine: str, tree: PatternTree) -> bool:
    if engine == "csts":
        return is_projection_free(tree)
    if engine == "fpt":
        return is_well_designed(tree)
    return True


def _draw_kind(rng: random.Random, kind: str) -> str:
    if kind == "mixed":
        return rng.choice(["projection_free", "well_designed", "simple"])
    return kind


def random_instance(rng: random.Random, cfg: FuzzConfig) -> tuple[str, PatternTree, Structure, dict]:
    kind = _draw_kind(rng, cfg.kind)
    if kind == "projection_free":
        wd = rng.random() < 0.5
        tree = random_tree(rng, cfg, well_designed=wd, projection_free=True)
        for _ in range(10):
            if wd or not is_well_designed(tree):
                break
            tree = random_tree(rng, cfg, well_designed=False, projection_free=True)
    else:
        tree = random_tree(rng, cfg, well_designed=True, simple=kind == "simple")
    db = random_db(rng, tree, cfg)
    return kind, tree, db, random_mapping(rng, tree, db)


def differential(trials: int, seed: int, cfg: FuzzConfig = FuzzConfig(), engine: str = "auto",
                 minimize: bool = True, stop_at_first: bool = False) -> FuzzResult:
    rng = random.Random(seed)
    res = FuzzResult()
    for trial in range(trials):
        kind, tree, db, mu = random_instance(rng, cfg)
        if not applicable(engine, tree):
            res.counts["skipped"] = res.counts.get("skipped", 0) + 1
            continue
        res.trials += 1
        res.counts[kind] = res.counts.get(kind, 0) + 1
        expected = is_solution_bruteforce(tree, db, mu)
        got = run_engine(engine, tree, db, mu)
        if got != expected:
            res.divergences.append(Divergence(trial, kind, tree, db, mu, expected, got, engine))
            if stop_at_first:
                break
    if minimize and res.divergences:
        res.minimized = shrink(res.divergences[0])
    return res


def _still_diverges(d: Divergence) -> bool:
    try:
        return run_engine(d.engine, d.tree, d.db, d.mu) != is_solution_bruteforce(d.tree, d.db, d.mu)
    except Exception:
        return False


def shrink(d: Divergence, check: Callable[[Divergence], bool] = _still_diverges) -> Divergence:
    """Greedy minimization: drop facts, then atoms, while the divergence persists."""
    changed = True
    while changed:
        changed = False
        for sym in sorted(d.db.relations, key=str):
            for t in sorted(d.db.relations[sym], key=str):
                rels = {s: set(ts) for s, ts in d.db.relations.items()}
                rels[sym].discard(t)
                cand = replace(d, db=Structure(d.db.domain, rels))
                if check(cand):
                    d, changed = cand, True
                    break
            if changed:
                break
        if changed:
            continue
        for t in d.tree.nodes:
            for a in sorted(d.tree.labels[t], key=str):
                labels = list(d.tree.labels)
                labels[t] = labels[t] - {a}
                try:
                    tree = PatternTree(d.tree.parents, tuple(labels), d.tree.free_vars & _vars(labels))
                except ValueError:
                    continue
                mu = {v: c for v, c in d.mu.items() if v in tree.free_vars}
                cand = replace(d, tree=tree, mu=mu)
                if check(cand):
                    d, changed = cand, True
                    break
            if changed:
                break
    return d


def _vars(labels) -> frozenset:
    return frozenset(v for lab in labels for a in lab for v in a.args)
