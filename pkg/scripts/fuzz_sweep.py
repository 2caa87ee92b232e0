"""Differential sweep of the engines against the reference semantics.

    python3 scripts/fuzz_sweep.py --trials 500 --seeds 0 1 2
"""
from __future__ import annotations

import argparse
import time

from patterntrees.fuzz import FuzzConfig, differential
from patterntrees.syntax import format_mapping, serialize_facts

RUNS = [("projection_free", "csts"), ("well_designed", "fpt"), ("simple", "fpt"), ("mixed", "auto")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--max-nodes", type=int, default=4)
    ap.add_argument("--domain", type=int, default=5)
    ap.add_argument("--density", type=float, default=0.5)
    args = ap.parse_args()
    print(f"{'kind':>16} {'engine':>6} {'seed':>5} {'trials':>7} {'diverge':>8} {'secs':>7}")
    failed = False
    for kind, engine in RUNS:
        cfg = FuzzConfig(max_nodes=args.max_nodes, domain=args.domain, density=args.density, kind=kind)
        for seed in args.seeds:
            t0 = time.perf_counter()
            res = differential(args.trials, seed, cfg, engine=engine)
            dt = time.perf_counter() - t0
            print(f"{kind:>16} {engine:>6} {seed:>5} {res.trials:>7} {len(res.divergences):>8} {dt:>7.2f}", flush=True)
            if res.minimized is not None:
                failed = True
                m = res.minimized
                print(m.tree, serialize_facts(m.db), f"mapping {format_mapping(m.mu)} oracle={m.expected}", sep="\n")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
