"""Additive and retro-yield (total starting-material weight) costs by dynamic programming.

Both measures evaluate a synthesis plan as a tree: a compound used twice is
paid for twice.  That is what makes them decomposable, unlike the assembly
index.  All arithmetic is exact (``fractions.Fraction``) so optimal ties, and
therefore plan counts, are reliable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .hypergraph import (
    DirectedHypergraph,
    HypergraphError,
    UnreachableTargetError,
    Witness,
    topological_vertices,
    validate_pathway,
    witness_depth,
)
from .ilp import Objective, _PathwaySearch, build_ilp, solve
from .molgraph import LabeledGraph


def heavy_atom_count(g: LabeledGraph) -> Fraction:
    return Fraction(g.n_vertices)


def unit_weight(g: LabeledGraph) -> Fraction:
    return Fraction(1)


@dataclass(frozen=True)
class CostModel:
    kind: str = "retro_yield"
    r: Fraction = Fraction(2)
    affixation_cost: Fraction = Fraction(1)
    cyclization_cost: Fraction = Fraction(1)
    seed_weight: Callable[[LabeledGraph], Fraction] = heavy_atom_count

    def __post_init__(self) -> None:
        if self.kind not in ("additive", "retro_yield"):
            raise ValueError(f"unknown cost kind {self.kind!r}")
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "affixation_cost", Fraction(self.affixation_cost))
        object.__setattr__(self, "cyclization_cost", Fraction(self.cyclization_cost))
        if self.kind == "retro_yield" and self.r <= 1:
            raise ValueError("retro-yield factor must exceed 1")
        if self.affixation_cost < 0 or self.cyclization_cost < 0:
            raise ValueError("step costs must be non-negative")

    @classmethod
    def additive(cls, affixation_cost=1, cyclization_cost=1) -> CostModel:
        return cls("additive", Fraction(2), Fraction(affixation_cost), Fraction(cyclization_cost))

    @classmethod
    def retro_yield(cls, r=Fraction(2), seed_weight=heavy_atom_count) -> CostModel:
        return cls("retro_yield", Fraction(r), seed_weight=seed_weight)

    def seed_value(self, g: LabeledGraph) -> Fraction:
        if self.kind == "additive":
            return Fraction(0)
        w = Fraction(self.seed_weight(g))
        if w < 0:
            raise ValueError("seed weights must be non-negative")
        return w

    def edge_value(self, weight: int, tail_values: list[Fraction]) -> Fraction:
        if self.kind == "additive":
            step = self.affixation_cost if weight else self.cyclization_cost
            return step + sum(tail_values, Fraction(0))
        return self.r * sum(tail_values, Fraction(0))


@dataclass
class DpTable:
    hypergraph: DirectedHypergraph
    cost_model: CostModel
    value: dict[int, Fraction | None] = field(default_factory=dict)
    best_edges: dict[int, tuple[int, ...]] = field(default_factory=dict)
    plan_count: dict[int, int] = field(default_factory=dict)

    def finite(self, v: int) -> bool:
        return self.value.get(v) is not None


def dp_solve(h: DirectedHypergraph, cm: CostModel) -> DpTable:
    """Bellman recursion over a topological order of ``h``.

    ``plan_count`` counts optimal plan trees: each occurrence of a fragment in
    a tail multiset chooses its own sub-plan.
    """
    order = topological_vertices(h)  # raises on cyclic input
    table = DpTable(h, cm)
    for v in order:
        if v in h.seeds:
            table.value[v] = cm.seed_value(h.graph(v))
            table.best_edges[v] = ()
            table.plan_count[v] = 1
            continue
        best: Fraction | None = None
        argmin: list[int] = []
        for eid in h.producers(v):
            e = h.edges[eid]
            tails = [table.value[u] for u in e.tail]
            if any(t is None for t in tails):
                continue
            c = cm.edge_value(e.weight, tails)
            if best is None or c < best:
                best, argmin = c, [eid]
            elif c == best:
                argmin.append(eid)
        table.value[v] = best
        table.best_edges[v] = tuple(sorted(argmin))
        count = 0
        for eid in argmin:
            prod = 1
            for u in h.edges[eid].tail:
                prod *= table.plan_count[u]
            count += prod
        table.plan_count[v] = count
    return table


def bellman_residuals(table: DpTable) -> list[int]:
    """Vertices whose stored value disagrees with one recursion step."""
    h, cm = table.hypergraph, table.cost_model
    bad = []
    for v in h.vertices:
        if v in h.seeds:
            ok = table.value[v] == cm.seed_value(h.graph(v))
        else:
            vals = []
            for eid in h.producers(v):
                e = h.edges[eid]
                tails = [table.value[u] for u in e.tail]
                if all(t is not None for t in tails):
                    vals.append(cm.edge_value(e.weight, tails))
            ok = table.value[v] == (min(vals) if vals else None)
        if not ok:
            bad.append(v)
    return bad


def optimal_edges(table: DpTable, goal: int) -> set[int]:
    """All edges that occur in some optimal plan for ``goal``."""
    if not table.finite(goal):
        raise UnreachableTargetError("goal has no finite cost")
    h = table.hypergraph
    seen = {goal}
    stack = [goal]
    used: set[int] = set()
    while stack:
        v = stack.pop()
        for eid in table.best_edges[v]:
            used.add(eid)
            for u in h.edges[eid].tail:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    return used


def count_optimal_plans(h: DirectedHypergraph, goal: int, cm: CostModel,
                        convention: str = "tree", table: DpTable | None = None) -> int:
    """Number of optimal plans for ``goal``.

    ``tree``: plan trees, as counted by the recursion.  ``shared``: plans that
    pick one producing edge per needed compound, so a compound needed twice is
    made once.
    """
    table = table or dp_solve(h, cm)
    if not table.finite(goal):
        raise UnreachableTargetError("goal has no finite cost")
    if convention == "tree":
        return table.plan_count[goal]
    if convention == "shared":
        search = _PathwaySearch(h, goal, [0] * len(h.edges), frozenset(optimal_edges(table, goal)))
        return search.count_optimal()
    raise ValueError(f"unknown counting convention {convention!r}")


def plan_cost(h: DirectedHypergraph, cm: CostModel, choice: dict[int, int], goal: int) -> Fraction:
    """Tree cost of the plan that assembles each compound by ``choice[v]``."""
    memo: dict[int, Fraction] = {}

    def cost(v: int) -> Fraction:
        if v not in memo:
            if v in h.seeds:
                memo[v] = cm.seed_value(h.graph(v))
            else:
                e = h.edges[choice[v]]
                memo[v] = cm.edge_value(e.weight, [cost(u) for u in e.tail])
        return memo[v]

    return cost(goal)


def extract_plan(table: DpTable, goal: int, pick: Callable[[tuple[int, ...]], int] = min) -> Witness:
    """Materialise one optimal plan as a witness (one producing edge per compound)."""
    if not table.finite(goal):
        raise UnreachableTargetError("goal has no finite cost")
    h = table.hypergraph
    choice: dict[int, int] = {}
    stack = [goal]
    while stack:
        v = stack.pop()
        if v in choice or v in h.seeds:
            continue
        choice[v] = pick(table.best_edges[v])
        stack.extend(h.edges[choice[v]].tail)
    value = plan_cost(h, table.cost_model, choice, goal)
    if value != table.value[goal]:
        raise AssertionError("extracted plan does not reproduce the optimal cost")
    w = Witness.from_edges(h, choice.values(), goal, value)
    report = validate_pathway(h, w, goal)
    if not report.ok:
        raise AssertionError(f"extracted plan is not a valid pathway: {report.reason}")
    return w


@dataclass
class PlanStatistics:
    value: Fraction
    plans_tree: int
    plans_shared: int
    min_affixations: int
    max_affixations: int
    min_depth: int
    max_depth: int


def _depth_range(table: DpTable, goal: int) -> tuple[int, int]:
    h = table.hypergraph
    lo: dict[int, int] = {}
    hi: dict[int, int] = {}

    def rec(v: int) -> None:
        if v in lo:
            return
        if v in h.seeds:
            lo[v] = hi[v] = 0
            return
        los, his = [], []
        for eid in table.best_edges[v]:
            tail = h.edges[eid].tail
            for u in tail:
                rec(u)
            los.append(1 + max(lo[u] for u in tail))
            his.append(1 + max(hi[u] for u in tail))
        lo[v], hi[v] = min(los), max(his)

    rec(goal)
    return lo[goal], hi[goal]


def plan_statistics(h: DirectedHypergraph, goal: int, cm: CostModel,
                    table: DpTable | None = None) -> PlanStatistics:
    """Counts, affixation range and depth range over all optimal plans."""
    table = table or dp_solve(h, cm)
    allowed = optimal_edges(table, goal)
    lo_aff = solve(build_ilp(h, goal, Objective.min_affixations(None), allowed)).affixation_count
    weights = tuple(-e.weight for e in h.edges)
    hi_aff = -solve(build_ilp(h, goal, Objective("custom", None, weights), allowed)).objective
    lo_d, hi_d = _depth_range(table, goal)
    return PlanStatistics(
        table.value[goal],
        table.plan_count[goal],
        count_optimal_plans(h, goal, cm, "shared", table),
        lo_aff,
        hi_aff,
        lo_d,
        hi_d,
    )


def plan_depth(h: DirectedHypergraph, w: Witness) -> int:
    return witness_depth(h, w)
