"""Membership tests on the clique family: critical-subtree engine vs. a naive child-by-child check.

The query has root a(?x) and two optional children: an n-clique over c and
a single c-edge.  For mu = {x -> 1} the naive check searches for the clique
first; the engine notices that the edge child subsumes it.

    python3 scripts/scaling_cliques.py --sizes 6 8 10 --seeds 0 1 2 --density 0.65 --timeout 60
"""
from __future__ import annotations

import argparse
import multiprocessing as mp
import random
import time

from patterntrees.csts import eval_projection_free
from patterntrees.homomorphism import find_homomorphism
from patterntrees.patterns import PatternTree, pp_solution_subtree, restrict_before
from patterntrees.relational import Atom, Const, Structure, Symbol, Var

C, A = Symbol("c"), Symbol("a")


def clique_tree(n: int) -> PatternTree:
    ys = [Var(f"y{i}") for i in range(1, n + 1)]
    clique = [Atom(C, (u, v)) for u in ys for v in ys if u != v]
    return PatternTree.build([
        (None, [Atom(A, (Var("x"),))]),
        (0, clique),
        (0, [Atom(C, (Var("z1"), Var("z2")))]),
    ])


def random_c_graph(seed: int, vertices: int = 30, density: float = 0.65) -> Structure:
    rng = random.Random(seed)
    vs = [Const(str(i)) for i in range(1, vertices + 1)]
    edges = set()
    for i, u in enumerate(vs):
        for v in vs[i + 1:]:
            if rng.random() < density:
                edges.add((u, v))
                edges.add((v, u))
    return Structure(vs, {C: edges, A: {(vs[0],)}})


def naive_member(p: PatternTree, db: Structure, mu: dict) -> bool:
    """Maximality by testing every child directly, in order."""
    sub = pp_solution_subtree(p, db, mu)
    if sub is None:
        return False
    for t in p.children_of(sub):
        fixed = restrict_before(p, mu, t)
        if find_homomorphism(Structure.from_atoms(p.labels[t]), db, fixed) is not None:
            return False
    return True


def _naive_worker(n, seed, density, out):
    p, db = clique_tree(n), random_c_graph(seed, density=density)
    t0 = time.perf_counter()
    ans = naive_member(p, db, {Var("x"): Const("1")})
    out.put((ans, time.perf_counter() - t0))


def time_naive(n: int, seed: int, density: float, timeout: float):
    """``(answer, seconds)``, or ``(None, timeout)`` when the naive check does not finish."""
    out = mp.Queue()
    proc = mp.Process(target=_naive_worker, args=(n, seed, density, out))
    proc.start()
    proc.join(timeout)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        return None, timeout
    return out.get()


def time_engine(n: int, seed: int, density: float):
    p, db = clique_tree(n), random_c_graph(seed, density=density)
    t0 = time.perf_counter()
    ans = eval_projection_free(p, db, {Var("x"): Const("1")})
    return ans, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--density", type=float, default=0.65)
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--skip-naive", action="store_true")
    args = ap.parse_args()
    print(f"{'n':>3} {'seed':>5} {'engine_s':>9} {'answer':>7} {'naive_s':>9} {'naive':>6}")
    for n in args.sizes:
        for seed in args.seeds:
            ans, t = time_engine(n, seed, args.density)
            if args.skip_naive:
                nans, nt = "-", float("nan")
            else:
                nans, nt = time_naive(n, seed, args.density, args.timeout)
                nans = "t/o" if nans is None else nans
            print(f"{n:>3} {seed:>5} {t:>9.3f} {str(ans):>7} {nt:>9.2f} {str(nans):>6}", flush=True)


if __name__ == "__main__":
    main()
