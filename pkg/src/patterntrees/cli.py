"""Command-line entry point.

Exit codes: 0 yes / success, 1 no, 2 usage or data error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analyzer import DEFAULT_COMBO_CAP, check_conditions, extcore_treewidth
from .cores import extension_core
from .csts import DEFAULT_SUBTREE_CAP, extcore_width, iter_csts
from .errors import (BudgetExceeded, CapExceeded, DataError, DomainLimit, InvalidAnchor, NotWellDesigned,
                     ParseError, VertexLimit, WidthCapExceeded)
from .ext import ExtInstance, ext_bruteforce, ext_via_extcore
from .fuzz import FuzzConfig, auto_engine, differential, run_engine
from .homomorphism import DEFAULT_WIDTH_BUDGET
from .patterns import all_solutions_bruteforce, is_projection_free, is_well_designed
from .relational import Graph, gaifman_graph
from .syntax import (format_mapping, load_query, mapping_to_json, parse_facts, parse_mapping, parse_pair,
                     serialize_facts, tree_to_json)
from .treewidth import treewidth

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror}") from None


def _mapping_arg(arg: str) -> dict:
    text = arg if arg.lstrip().startswith("{") else _read(arg)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"invalid mapping JSON: {e}") from None
    return parse_mapping(doc)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_eval(args) -> int:
    tree = load_query(_read(args.query))
    db = parse_facts(_read(args.data))
    mu = _mapping_arg(args.mapping)
    outside = set(mu) - tree.free_vars
    if outside:
        raise DataError(f"mapping binds non-free variables: {sorted(v.name for v in outside)}")
    engine = auto_engine(tree) if args.engine == "auto" else args.engine
    if engine == "csts" and not is_projection_free(tree):
        raise DataError("the csts engine needs a projection-free query")
    if engine == "fpt" and not is_well_designed(tree):
        raise NotWellDesigned("the fpt engine needs a well-designed query")
    kw = {} if engine == "brute" else {"width_budget": args.width_budget}
    ok = run_engine(engine, tree, db, mu, **kw)
    _emit(args, {"answer": ok, "engine": engine, "mapping": mapping_to_json(mu)},
          f"{'yes' if ok else 'no'} ({engine})")
    return EXIT_YES if ok else EXIT_NO


def cmd_solve(args) -> int:
    tree = load_query(_read(args.query))
    db = parse_facts(_read(args.data))
    answers = all_solutions_bruteforce(tree, db, args.max_vars, args.max_consts)
    _emit(args, {"answers": [mapping_to_json(a) for a in answers]},
          "\n".join(format_mapping(a) for a in answers) or "(no answers)")
    return EXIT_YES


def cmd_analyze(args) -> int:
    tree = load_query(_read(args.query))
    report = check_conditions(tree, args.c, args.combo_cap, args.subtree_cap)
    lines = [f"{k}: {v}" for k, v in report["flags"].items()]
    for name in ("condition_a", "condition_b", "condition_c"):
        r = report[name]
        if r is not None:
            width = r.get("max_treewidth", r.get("width"))
            lines.append(f"{name}: holds={r['holds']} value={width}")
    if report["csts"] is not None:
        lines.append(f"csts max extcore treewidth: {report['csts']['max_treewidth']}")
    lines += report["notes"]
    _emit(args, report, "\n".join(lines))
    return EXIT_YES


def cmd_csts(args) -> int:
    tree = load_query(_read(args.query))
    rows = []
    for sub, pair in iter_csts(tree, args.subtree_cap):
        w, exact = extcore_width(pair)
        rows.append({"subtree": sorted(sub), "child": pair.child, "context": sorted(map(str, pair.context)),
                     "child_label": sorted(map(str, pair.child_label)), "treewidth": w, "exact": exact})
    text = "\n".join(f"T'={r['subtree']} child={r['child']} treewidth={r['treewidth']}" for r in rows)
    _emit(args, {"pairs": rows, "max_treewidth": max((r["treewidth"] for r in rows), default=-1)},
          text or "(no pairs)")
    return EXIT_YES


def cmd_extcore(args) -> int:
    pair = parse_pair(_read(args.pair))
    ec = extension_core(pair)
    w, exact, _ = extcore_treewidth(pair)
    _emit(args, {"extcore": [str(a) for a in ec.sorted_atoms()], "isolated": sorted(map(str, ec.isolated())),
                 "treewidth": w, "exact": exact},
          serialize_facts(ec) + f"# treewidth {w}{'' if exact else ' (upper bound)'}")
    return EXIT_YES


def cmd_ext(args) -> int:
    pair = parse_pair(_read(args.pair))
    target = parse_facts(_read(args.data))
    inst = ExtInstance(pair, target, _mapping_arg(args.mapping))
    ok = ext_bruteforce(inst) if args.engine == "brute" else ext_via_extcore(inst, args.width_budget)
    _emit(args, {"answer": ok, "engine": args.engine}, "yes" if ok else "no")
    return EXIT_YES if ok else EXIT_NO


def _graph_from_text(text: str) -> Graph:
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.upper().startswith("SELECT"):
        tree = load_query(text)
        return gaifman_graph(tree.label(tree.nodes))
    edges, vertices = [], set()
    for n, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        if len(parts) == 1:
            vertices.add(parts[0])
        elif len(parts) == 2 and parts[0] != parts[1]:
            edges.append(tuple(parts))
        else:
            raise DataError(f"line {n}: expected 'u v' or a single vertex")
    return Graph.from_edges(edges, vertices)


def cmd_treewidth(args) -> int:
    g = _graph_from_text(_read(args.graph))
    w, exact, td = treewidth(g)
    _emit(args, {"treewidth": w, "exact": exact, "valid": td.is_valid_for(g),
                 "bags": [sorted(map(str, b)) for b in td.bags], "parent": list(td.parent)},
          f"treewidth {w}{'' if exact else ' (upper bound)'}")
    return EXIT_YES


def cmd_fuzz(args) -> int:
    cfg = FuzzConfig(args.max_nodes, args.max_atoms, args.max_arity, args.max_vars, args.domain,
                     args.density, args.kind)
    res = differential(args.trials, args.seed, cfg, engine=args.engine)
    payload = {"trials": res.trials, "divergences": len(res.divergences), "kinds": res.counts}
    lines = [f"trials: {res.trials}", f"divergences: {len(res.divergences)}"]
    if res.counts.get("skipped"):
        lines.append(f"skipped (engine not applicable): {res.counts['skipped']}")
    if res.minimized is not None:
        d = res.minimized
        payload["first"] = {"trial": d.trial, "tree": tree_to_json(d.tree), "facts": serialize_facts(d.db),
                            "mapping": mapping_to_json(d.mu), "expected": d.expected, "got": d.got}
        lines += [f"first divergence (trial {d.trial}, minimized):", str(d.tree), serialize_facts(d.db),
                  f"mapping {format_mapping(d.mu)}: oracle={d.expected} engine={d.got}"]
    _emit(args, payload, "\n".join(lines))
    return EXIT_YES if not res.divergences else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="patterntrees", description="Pattern-tree query engine and tractability analyzer")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = common(sub.add_parser("eval", help="is a mapping an answer?"))
    p.add_argument("query")
    p.add_argument("data")
    p.add_argument("mapping", help="JSON file or inline JSON object")
    p.add_argument("--engine", choices=["auto", "brute", "csts", "fpt"], default="auto")
    p.add_argument("--width-budget", type=int, default=DEFAULT_WIDTH_BUDGET)
    p.set_defaults(func=cmd_eval)

    p = common(sub.add_parser("solve", help="all answers, by the reference semantics"))
    p.add_argument("query")
    p.add_argument("data")
    p.add_argument("--max-vars", type=int, default=10)
    p.add_argument("--max-consts", type=int, default=8)
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("analyze", help="tractability report"))
    p.add_argument("query")
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--combo-cap", type=int, default=DEFAULT_COMBO_CAP)
    p.add_argument("--subtree-cap", type=int, default=DEFAULT_SUBTREE_CAP)
    p.set_defaults(func=cmd_analyze)

    p = common(sub.add_parser("csts", help="critical pairs over all subtrees"))
    p.add_argument("query")
    p.add_argument("--subtree-cap", type=int, default=DEFAULT_SUBTREE_CAP)
    p.set_defaults(func=cmd_csts)

    p = common(sub.add_parser("extcore", help="extension core of a pair file"))
    p.add_argument("pair")
    p.set_defaults(func=cmd_extcore)

    p = common(sub.add_parser("ext", help="decide an extension instance"))
    p.add_argument("pair")
    p.add_argument("data")
    p.add_argument("mapping")
    p.add_argument("--engine", choices=["extcore", "brute"], default="extcore")
    p.add_argument("--width-budget", type=int, default=DEFAULT_WIDTH_BUDGET)
    p.set_defaults(func=cmd_ext)

    p = common(sub.add_parser("treewidth", help="treewidth of an edge list or of a query's Gaifman graph"))
    p.add_argument("graph")
    p.set_defaults(func=cmd_treewidth)

    p = common(sub.add_parser("fuzz", help="differential test of the engines against the oracle"))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=["auto", "csts", "fpt"], default="auto")
    p.add_argument("--kind", choices=["mixed", "projection_free", "well_designed", "simple"], default="mixed")
    p.add_argument("--max-nodes", type=int, default=4)
    p.add_argument("--max-atoms", type=int, default=3)
    p.add_argument("--max-arity", type=int, default=3)
    p.add_argument("--max-vars", type=int, default=6)
    p.add_argument("--domain", type=int, default=5)
    p.add_argument("--density", type=float, default=0.5)
    p.set_defaults(func=cmd_fuzz)
    return ap


def run_cli(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ParseError, DataError, InvalidAnchor, NotWellDesigned, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, CapExceeded, DomainLimit, VertexLimit, WidthCapExceeded) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
