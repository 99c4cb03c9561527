"""``asmbly`` command line.

Exit codes: 0 success, 1 infeasible or unreachable target, 2 input error,
3 resource cap hit.  Identical arguments give byte-identical outputs; nothing
time- or host-dependent is written to stdout or to output files.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .dp import (
    CostModel,
    dp_solve,
    extract_plan,
    heavy_atom_count,
    plan_cost,
    plan_statistics,
    unit_weight,
)
from .grammar import cfg_from_witness, cnf_growth, to_cnf
from .hypergraph import (
    DirectedHypergraph,
    HypergraphError,
    UnreachableTargetError,
    Witness,
    validate_pathway,
    witness_depth,
    witness_to_dot,
)
from .ilp import (
    BudgetExceededError,
    InfeasibleError,
    Objective,
    build_ilp,
    count_optimal_witnesses,
    enumerate_optimal_witnesses,
    solve,
)
from .molgraph import GraphError, LabeledGraph, ParseError, parse_graph_text, parse_smiles
from .rewrite import DegenerateInputError, ExpansionOptions, ResourceLimitError, RuleKind, expand

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

OBJECTIVES = {
    "lex1000": Objective.lex_1000,
    "fewer-edges": lambda: Objective.min_affixations("fewer_edges"),
    "more-edges": lambda: Objective.min_affixations("more_edges"),
    "affixations": lambda: Objective.min_affixations(None),
}


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input and output helpers

def load_target(source: str, fmt: str) -> LabeledGraph:
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    elif fmt == "edgelist":
        raise InputError(f"no such file: {source}")
    else:
        text = source
    if fmt == "auto":
        body = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        body = [ln for ln in body if ln]
        fmt = "edgelist" if len(body) != 1 or " " in body[0] else "smiles"
    if fmt == "smiles":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if len(lines) != 1:
            raise InputError("SMILES input must hold exactly one structure")
        return parse_smiles(lines[0].split()[0])
    return parse_graph_text(text)


class Output:
    """Collects files for ``--out``; stdout gets the report lines."""

    def __init__(self, out: str | None):
        self.dir = Path(out) if out else None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def line(self, text: str) -> None:
        sys.stdout.write(text + "\n")

    def file(self, name: str, content: str) -> None:
        if self.dir is not None:
            (self.dir / name).write_text(content)


def _options(args) -> ExpansionOptions:
    if args.max_compounds is not None and args.max_compounds <= 0:
        raise InputError("--max-compounds must be positive")
    return ExpansionOptions(max_compounds=args.max_compounds,
                            cyclization_only=getattr(args, "cyclization_only", False))


def _expand(args):
    target = load_target(args.input, args.format)
    return expand(target, RuleKind.parse(args.rule), _options(args))


def _witness_json(w: Witness, target: int) -> str:
    return json.dumps({"target": target, **w.to_dict()}, indent=2, sort_keys=True) + "\n"


def _counts(h: DirectedHypergraph, w: Witness) -> str:
    return (f"affixations={w.affixation_count} cyclizations={w.cyclization_count} "
            f"edges={len(w.selected_edges)} depth={witness_depth(h, w)}")


def _cost_model(args) -> CostModel:
    if args.cost == "additive":
        return CostModel.additive()
    weight = heavy_atom_count if args.seed_weight == "atoms" else unit_weight
    try:
        return CostModel.retro_yield(Fraction(args.r), weight)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_expand(args, out: Output) -> int:
    exp = _expand(args)
    h = exp.hypergraph
    out.file("hypergraph.json", h.to_json())
    out.line(h.summary())
    return EXIT_OK


def _ilp_witness(args, out: Output):
    exp = _expand(args)
    h = exp.hypergraph
    model = build_ilp(h, exp.target, OBJECTIVES[args.objective]())
    if getattr(args, "emit_lp", False):
        out.file("model.lp", model.to_lp())
    if getattr(args, "emit_hypergraph", False):
        out.file("hypergraph.json", h.to_json())
    return exp, model, solve(model)


def cmd_index(args, out: Output) -> int:
    exp, model, w = _ilp_witness(args, out)
    h = exp.hypergraph
    out.line(h.summary())
    out.line(f"index={w.affixation_count}")
    out.line(_counts(h, w))
    out.file("witness.dot", witness_to_dot(h, w, exp.target))
    out.file("witness.json", _witness_json(w, exp.target))
    return EXIT_OK


def cmd_witnesses(args, out: Output) -> int:
    exp, model, first = _ilp_witness(args, out)
    h = exp.hypergraph
    out.line(f"index={first.affixation_count}")
    if args.count:
        out.line(f"optimal_witnesses={count_optimal_witnesses(model)}")
    limit = args.limit if args.all else 1
    model.nogoods.clear()
    found = enumerate_optimal_witnesses(model, limit)
    for k, w in enumerate(found):
        out.line(f"witness {k}: {_counts(h, w)} selected={','.join(map(str, w.selected_edges))}")
        out.file(f"witness_{k}.dot", witness_to_dot(h, w, exp.target))
    return EXIT_OK


def cmd_dp(args, out: Output) -> int:
    exp = _expand(args)
    h = exp.hypergraph
    cm = _cost_model(args)
    table = dp_solve(h, cm)
    if not table.finite(exp.target):
        raise UnreachableTargetError("target has no finite cost")
    out.line(f"cost={table.value[exp.target]}")
    if args.count:
        st = plan_statistics(h, exp.target, cm, table)
        out.line(f"plans_tree={st.plans_tree} plans_shared={st.plans_shared}")
        out.line(f"affixations_min={st.min_affixations} affixations_max={st.max_affixations}")
        out.line(f"depth_min={st.min_depth} depth_max={st.max_depth}")
    w = extract_plan(table, exp.target)
    out.line(_counts(h, w))
    if args.witness:
        out.file("plan.dot", witness_to_dot(h, w, exp.target))
        out.file("plan.json", _witness_json(w, exp.target))
    return EXIT_OK


def cmd_compare(args, out: Output) -> int:
    exp = _expand(args)
    h = exp.hypergraph
    ilp_w = solve(build_ilp(h, exp.target, OBJECTIVES[args.objective]()))
    cm = _cost_model(args)
    table = dp_solve(h, cm)
    dp_w = extract_plan(table, exp.target)
    st = plan_statistics(h, exp.target, cm, table)
    ilp_cost = witness_cost(h, cm, ilp_w, exp.target)
    out.line(f"{'method':<6} {'affixations':>11} {'cyclizations':>12} {'depth':>5} {'cost':>10}")
    for name, w, cost in (("ilp", ilp_w, ilp_cost), ("dp", dp_w, table.value[exp.target])):
        out.line(f"{name:<6} {w.affixation_count:>11} {w.cyclization_count:>12} "
                 f"{witness_depth(h, w):>5} {str(cost):>10}")
    out.line(f"dp_optimal_plans={st.plans_tree} dp_depth_max={st.max_depth} "
             f"dp_affixations_min={st.min_affixations}")
    return EXIT_OK


def witness_cost(h: DirectedHypergraph, cm: CostModel, w: Witness, goal: int) -> Fraction:
    """Tree cost of a witness under ``cm`` (its edges define the plan)."""
    choice = {}
    for eid in w.selected_edges:
        for z in h.edges[eid].head:
            choice[z] = eid
    return plan_cost(h, cm, choice, goal)


def cmd_grammar(args, out: Output) -> int:
    exp, model, w = _ilp_witness(args, out)
    g = cfg_from_witness(w, exp.hypergraph, exp.target)
    text = g.to_text()
    out.file("grammar.txt", text)
    sys.stdout.write(text)
    if args.cnf:
        c = to_cnf(g)
        out.file("grammar_cnf.txt", c.to_text())
        out.line(f"# cnf: nonterminals={len(c.nonterminals)} rules={c.rule_count} "
                 f"added={cnf_growth(g)}")
    return EXIT_OK


def cmd_validate(args, out: Output) -> int:
    try:
        data = json.loads(Path(args.witness).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read witness: {exc}") from None
    if args.hypergraph:
        h = DirectedHypergraph.from_json(Path(args.hypergraph).read_text())
        target = int(data["target"])
    else:
        exp = _expand(args)
        h, target = exp.hypergraph, exp.target
    w = Witness.from_edges(h, data["selected_edges"], target)
    report = validate_pathway(h, w, target)
    if report.ok:
        out.line(f"valid {_counts(h, w)}")
        return EXIT_OK
    out.line(f"invalid: {report.reason}")
    return EXIT_INFEASIBLE


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommand copies must not overwrite values given before the subcommand
        def d(value):
            return argparse.SUPPRESS if suppress else value

        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--rule", choices=["split", "edge"], default=d("split"),
                       help="disassembly rule: vertex split or edge removal (default split)")
        p.add_argument("--format", choices=["auto", "edgelist", "smiles"], default=d("auto"),
                       help="input format; auto treats a one-token input as SMILES")
        p.add_argument("--out", metavar="DIR", default=d(None),
                       help="directory for JSON/DOT/LP files")
        p.add_argument("--threads", type=int, default=d(1),
                       help="accepted for compatibility; runs are sequential")
        p.add_argument("--max-compounds", type=int, metavar="N", default=d(None),
                       help="abort with exit 3 when the expansion exceeds N compounds")
        return p

    def ilp_flags(p, default="fewer-edges"):
        p.add_argument("--objective", choices=sorted(OBJECTIVES), default=default,
                       help="pathway objective; all minimise affixations first "
                            f"and differ only in tie-breaking (default {default})")

    def dp_flags(p):
        p.add_argument("--cost", choices=["tw", "additive"], default="tw",
                       help="retro-yield total weight or additive step cost")
        p.add_argument("--r", default="2", help="retro-yield factor, a rational > 1 (default 2)")
        p.add_argument("--seed-weight", choices=["atoms", "unit"], default="atoms",
                       help="starting-material weight of a seed")

    parser = argparse.ArgumentParser(
        prog="asmbly",
        description="Assembly index and synthesis-plan costs on disassembly hypergraphs.",
        parents=[global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[global_flags(True)], help=help_text, description=help_text)
        p.add_argument("input", help="edge-list file, SMILES file, or a SMILES string")
        p.set_defaults(func=func)
        return p

    p = add("expand", cmd_expand, "build the disassembly hypergraph of a target")
    p.add_argument("--cyclization-only", action="store_true",
                   help="follow inverse cyclizations only (the de-cyclization closure)")

    p = add("index", cmd_index, "assembly index with an optimal witness")
    ilp_flags(p)
    p.add_argument("--emit-lp", action="store_true", help="write model.lp to --out")
    p.add_argument("--emit-hypergraph", action="store_true", help="write hypergraph.json to --out")

    p = add("witnesses", cmd_witnesses, "list or count optimal witnesses")
    ilp_flags(p)
    p.add_argument("--all", action="store_true", help="list optimal witnesses up to --limit")
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--count", action="store_true", help="count all optimal witnesses")

    p = add("dp", cmd_dp, "optimal plan cost by dynamic programming")
    dp_flags(p)
    p.add_argument("--count", action="store_true", help="count optimal plans and report ranges")
    p.add_argument("--witness", action="store_true", help="write plan.dot/plan.json to --out")

    p = add("compare", cmd_compare, "ILP witness versus DP plan on the same hypergraph")
    # 1000 w - 1 favours witnesses with many cyclizations, the contrast the comparison shows
    ilp_flags(p, "lex1000")
    dp_flags(p)

    p = add("grammar", cmd_grammar, "straight-line grammar of an optimal witness")
    ilp_flags(p)
    p.add_argument("--cnf", action="store_true", help="also convert to Chomsky normal form")

    p = add("validate", cmd_validate, "check a witness file against a target's hypergraph")
    p.add_argument("--witness", required=True, help="witness JSON (as written by index)")
    p.add_argument("--hypergraph", help="hypergraph JSON instead of re-expanding the input")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    try:
        out = Output(args.out)
        return args.func(args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, GraphError, DegenerateInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ResourceLimitError, BudgetExceededError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InfeasibleError, UnreachableTargetError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except HypergraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
