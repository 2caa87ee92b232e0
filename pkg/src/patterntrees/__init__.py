"""Evaluation and tractability analysis for pattern trees (AND/OPTIONAL queries)."""
from .analyzer import check_conditions
from .cores import ExtensionPair, core, extension_core, is_isomorphic, projection_under_hom, projection_under_set
from .csts import CriticalPair, critical_subtrees, csts_all, eval_projection_free
from .errors import PatternTreeError
from .ext import ExtInstance, cq_to_ext, ext_bruteforce, ext_via_extcore
from .fpt import InterfaceComponent, eval_fpt, interface_components, relevant_nodes, s_components, stop_set
from .homomorphism import evaluate_cq, find_homomorphism, hom_via_decomposition
from .patterns import (PatternTree, all_solutions_bruteforce, is_projection_free, is_simple,
                       is_solution_bruteforce, is_well_designed, pp_solution_subtree, restrict_before)
from .relational import Atom, Const, Graph, Structure, Symbol, Var, atom, gaifman_graph, restrict, singleton_marking, union
from .syntax import parse_facts, parse_query, serialize_query
from .treewidth import TreeDecomposition, treewidth, treewidth_exact, treewidth_upper
