"""Static analysis of the clique family: critical-pair widths and interface-component widths per n.

    python3 scripts/clique_report.py --sizes 2 3 4 5 6
"""
from __future__ import annotations

import argparse

from patterntrees.analyzer import check_conditions
from patterntrees.csts import critical_subtrees, extcore_width

from scaling_cliques import clique_tree


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    args = ap.parse_args()
    print(f"{'n':>3} {'root-test width':>16} {'csts max':>9} {'cond (a) max':>13}")
    for n in args.sizes:
        p = clique_tree(n)
        root_w = max(extcore_width(pair)[0] for pair in critical_subtrees(p, frozenset({p.root})))
        rep = check_conditions(p)
        print(f"{n:>3} {root_w:>16} {rep['csts']['max_treewidth']:>9} {rep['condition_a']['max_treewidth']:>13}")


if __name__ == "__main__":
    main()
