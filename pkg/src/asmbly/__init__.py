"""Assembly indices and synthesis-plan costs on disassembly hypergraphs."""

from .dp import CostModel, count_optimal_plans, dp_solve, extract_plan, plan_statistics
from .grammar import Cfg, cfg_from_witness, expand_string, to_cnf
from .hypergraph import (
    DirectedHypergraph,
    Hyperedge,
    Witness,
    is_acyclic,
    is_grounded,
    reachable_from,
    restrict_below,
    to_b_hypergraph,
    validate_pathway,
    witness_depth,
)
from .ilp import (
    Objective,
    assembly_index,
    brute_force_assembly_index,
    build_ilp,
    enumerate_optimal_witnesses,
    solve,
)
from .molgraph import (
    LabeledGraph,
    canonical_form,
    connected_components,
    cyclomatic_number,
    is_base_compound,
    is_isomorphic,
    parse_graph_text,
    parse_smiles,
)
from .rewrite import RuleKind, decyclization_closure, expand

__all__ = [
    "Cfg", "CostModel", "DirectedHypergraph", "Hyperedge", "LabeledGraph", "Objective",
    "RuleKind", "Witness", "assembly_index", "brute_force_assembly_index", "build_ilp",
    "canonical_form", "cfg_from_witness", "connected_components", "count_optimal_plans",
    "cyclomatic_number", "decyclization_closure", "dp_solve", "enumerate_optimal_witnesses",
    "expand", "expand_string", "extract_plan", "is_acyclic", "is_base_compound",
    "is_grounded", "is_isomorphic", "parse_graph_text", "parse_smiles", "plan_statistics",
    "reachable_from", "restrict_below", "solve", "to_b_hypergraph", "to_cnf",
    "validate_pathway", "witness_depth",
]
