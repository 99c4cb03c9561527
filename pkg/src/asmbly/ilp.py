"""Minimal-affixation pathways as a 0/1 program, solved by exact branch and bound.

The model has one binary per vertex (``y_v``) and per hyperedge (``x_e``):

* every selected non-seed vertex is assembled by exactly one selected edge,
* every tail vertex of a selected edge is selected,
* every selected vertex other than the goal feeds some selected edge,
* the goal is selected.

The solver never materialises a simplex tableau.  It branches on the
highest open vertex (in a heads-before-tails order) over its producing edges;
because the hypergraph is acyclic that vertex can never be required again,
so a search state is just the set of open vertices.  States are memoised,
which turns the search into a depth-first branch and bound with a
transposition table.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .hypergraph import (
    DirectedHypergraph,
    HypergraphError,
    UnreachableTargetError,
    Witness,
    ancestors,
    is_acyclic,
    reachable_from,
    validate_pathway,
)

INF = float("inf")


class InfeasibleError(RuntimeError):
    pass


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class Objective:
    """What a pathway costs.

    ``min_affixations`` counts affixation edges; ``tie_break`` then prefers
    fewer (or more) edges among equally good pathways.  ``lex_1000`` is the
    literal ``sum (1000 w_e - 1) x_e``.  ``custom`` takes one integer per edge.
    """

    mode: str = "min_affixations"
    tie_break: str | None = "fewer_edges"
    costs: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("min_affixations", "lex_1000", "custom", "edge_count"):
            raise ValueError(f"unknown objective mode {self.mode!r}")
        if self.tie_break not in (None, "fewer_edges", "more_edges"):
            raise ValueError(f"unknown tie break {self.tie_break!r}")
        if self.mode == "custom" and self.costs is None:
            raise ValueError("custom objective needs per-edge costs")

    @classmethod
    def min_affixations(cls, tie_break: str | None = "fewer_edges") -> Objective:
        return cls("min_affixations", tie_break)

    @classmethod
    def lex_1000(cls) -> Objective:
        return cls("lex_1000", None)

    @classmethod
    def unit(cls) -> Objective:
        """Every edge costs one: the minimum number of hyperedges."""
        return cls("edge_count", None)

    def edge_costs(self, h: DirectedHypergraph) -> list[int]:
        """Integer search costs; ``report_value`` maps a selection back."""
        if self.mode == "custom":
            if len(self.costs) != len(h.edges):
                raise ValueError("custom costs need one entry per hyperedge")
            return list(self.costs)
        if self.mode == "lex_1000":
            return [1000 * e.weight - 1 for e in h.edges]
        if self.mode == "edge_count":
            return [1] * len(h.edges)
        if self.tie_break is None:
            return [e.weight for e in h.edges]
        scale = len(h.compounds) + 1
        if self.tie_break == "fewer_edges":
            return [scale * e.weight + 1 for e in h.edges]
        return [scale * e.weight - 1 for e in h.edges]

    def report_value(self, h: DirectedHypergraph, edges: Iterable[int]) -> int:
        edges = list(edges)
        if self.mode == "min_affixations":
            return sum(h.edges[e].weight for e in edges)
        if self.mode == "edge_count":
            return len(edges)
        costs = self.edge_costs(h)
        return sum(costs[e] for e in edges)


@dataclass
class IlpModel:
    hypergraph: DirectedHypergraph
    goal: int
    objective: Objective
    costs: list[int]
    allowed_edges: frozenset[int] | None = None
    nogoods: list[frozenset[int]] = field(default_factory=list)
    node_limit: int | None = None
    time_limit: float | None = None
    _search: _PathwaySearch | None = field(default=None, repr=False)

    # -- explicit constraint rows ------------------------------------------
    def variables(self) -> tuple[list[str], list[str]]:
        h = self.hypergraph
        return [f"y{v}" for v in h.vertices], [f"x{e}" for e in range(len(h.edges))]

    def rows(self) -> list[tuple[dict[str, int], str, int]]:
        """Sparse rows ``(coefficients, sense, rhs)`` of the program."""
        h = self.hypergraph
        out: list[tuple[dict[str, int], str, int]] = []
        edges = range(len(h.edges)) if self.allowed_edges is None else sorted(self.allowed_edges)
        allowed = set(edges)
        for v in h.vertices:
            prod = [e for e in h.producers(v) if e in allowed]
            cons = [e for e in h.consumers(v) if e in allowed]
            if v not in h.seeds:
                row = {f"x{e}": 1 for e in prod}
                row[f"y{v}"] = row.get(f"y{v}", 0) - 1
                out.append((row, "=", 0))
            for e in prod:
                out.append(({f"y{v}": 1, f"x{e}": -1}, ">=", 0))
            for e in cons:
                out.append(({f"y{v}": 1, f"x{e}": -1}, ">=", 0))
            if v != self.goal:
                row = {f"x{e}": 1 for e in cons}
                row[f"y{v}"] = row.get(f"y{v}", 0) - 1
                out.append((row, ">=", 0))
        for e in set(range(len(h.edges))) - allowed:
            out.append(({f"x{e}": 1}, "=", 0))
        out.append(({f"y{self.goal}": 1}, "=", 1))
        for cut in self.nogoods:
            out.append(({f"x{e}": 1 for e in sorted(cut)}, "<=", len(cut) - 1))
        return out

    def check(self, edges: Iterable[int]) -> bool:
        """Does the 0/1 point induced by ``edges`` satisfy every row?"""
        h = self.hypergraph
        edges = set(edges)
        verts = {self.goal}
        for e in edges:
            verts.update(h.edges[e].tail)
            verts.update(h.edges[e].head)
        value = {f"x{e}": 1 for e in edges} | {f"y{v}": 1 for v in verts}
        for coeffs, sense, rhs in self.rows():
            lhs = sum(c * value.get(name, 0) for name, c in coeffs.items())
            if sense == "=" and lhs != rhs or sense == ">=" and lhs < rhs or sense == "<=" and lhs > rhs:
                return False
        return True

    def to_lp(self) -> str:
        """CPLEX LP text of the program, for cross-checking with other solvers."""
        h = self.hypergraph
        ys, xs = self.variables()

        def fmt(coeffs: dict[str, int]) -> str:
            terms = []
            for name, c in coeffs.items():
                if c == 0:
                    continue
                sign = "-" if c < 0 else "+"
                mag = "" if abs(c) == 1 else f"{abs(c)} "
                terms.append(f"{sign} {mag}{name}")
            text = " ".join(terms) or "0 x0"
            return text[2:] if text.startswith("+ ") else text

        lines = ["\\ minimal-affixation pathway", "Minimize"]
        lines.append(" obj: " + fmt({f"x{e}": c for e, c in enumerate(self.costs)}))
        lines.append("Subject To")
        for k, (coeffs, sense, rhs) in enumerate(self.rows()):
            lines.append(f" c{k}: {fmt(coeffs)} {sense} {rhs}")
        lines.append("Binary")
        lines.extend(f" {name}" for name in ys + xs)
        lines.append("End")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# search core

def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _PathwaySearch:
    """Memoised branch and bound over sets of open vertices."""

    def __init__(self, h: DirectedHypergraph, goal: int, costs: list[int],
                 allowed: frozenset[int] | None = None,
                 node_limit: int | None = None, time_limit: float | None = None):
        self.h = h
        self.costs = costs
        self.node_limit = node_limit
        self.time_limit = time_limit
        self.nodes = 0
        self._started = time.monotonic()
        below = ancestors(h, goal)
        # heads before tails: reverse a topological order of the part below the goal
        order = _reverse_topological(h, below, allowed)
        self.vertex_at = order
        self.pos = {v: k for k, v in enumerate(order)}
        n = len(order)
        self.producers: list[list[int]] = [[] for _ in range(n)]
        self.tailmask: dict[int, int] = {}
        dead = 0
        for k, v in enumerate(order):
            if v in h.seeds:
                continue
            for e in h.producers(v):
                if allowed is not None and e not in allowed:
                    continue
                if e not in self.tailmask:
                    m = 0
                    for u in h.edges[e].tail:
                        if u not in h.seeds:
                            m |= 1 << self.pos[u]
                    self.tailmask[e] = m
                self.producers[k].append(e)
            if not self.producers[k]:
                dead |= 1 << k
        self.dead = dead
        self.negative = any(costs[e] < 0 for e in self.tailmask)
        # vertices below each vertex (inclusive), as position masks
        self.below = [0] * n
        self.minc = [0] * n
        self.lb: list[float] = [0] * n
        for k in range(n - 1, -1, -1):
            m = 1 << k
            for e in self.producers[k]:
                m |= self._union_below(self.tailmask[e])
            self.below[k] = m
        self.min_neg = min((min(costs[e], 0) for e in self.tailmask), default=0)
        self.nonseed_suffix = [0] * (n + 1)
        for k in range(n - 1, -1, -1):
            self.nonseed_suffix[k] = self.nonseed_suffix[k + 1] + (order[k] not in h.seeds)
        for k in range(n - 1, -1, -1):
            if order[k] in h.seeds:
                continue
            if dead >> k & 1:
                self.minc[k] = INF
                self.lb[k] = INF
                continue
            self.minc[k] = min(max(costs[e], 0) for e in self.producers[k])
            self.lb[k] = min(max(costs[e], 0) + self._positive_bound(self.tailmask[e])
                             for e in self.producers[k])
        self.exact: dict[int, tuple[float, int | None]] = {0: (0, None)}
        self.lower: dict[int, float] = {}
        self.root = 0 if goal in h.seeds else 1 << self.pos[goal]

    def _union_below(self, mask: int) -> int:
        m = 0
        for k in _bits(mask):
            m |= self.below[k]
        return m

    def _positive_bound(self, mask: int) -> float:
        if not mask:
            return 0
        if mask & self.dead:
            return INF
        ks = list(_bits(mask))
        total = sum(self.minc[k] for k in ks)
        best = total
        if len(ks) == 1:
            return max(best, self.lb[ks[0]])
        for k in ks:
            outside = mask & ~self.below[k]
            val = self.lb[k] + sum(self.minc[u] for u in _bits(outside))
            if val > best:
                best = val
        return best

    def bound(self, mask: int) -> float:
        b = self._positive_bound(mask)
        if self.negative and mask and b < INF:
            low = (mask & -mask).bit_length() - 1
            b += self.min_neg * self.nonseed_suffix[low]
        return b

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise BudgetExceededError(f"search exceeded {self.node_limit} nodes")
        if self.time_limit is not None and self.nodes % 1024 == 0:
            if time.monotonic() - self._started > self.time_limit:
                raise BudgetExceededError(f"search exceeded {self.time_limit} s")

    def _children(self, mask: int) -> list[tuple[float, int, int]]:
        k = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << k)
        out = []
        for e in self.producers[k]:
            child = rest | self.tailmask[e]
            if child & self.dead:
                continue
            out.append((self.costs[e] + self.bound(child), e, child))
        out.sort(key=lambda t: (t[0], -len(self.h.edges[t[1]].tail), t[1]))
        return out

    def value(self, mask: int, ub: float = INF) -> float:
        """Exact completion cost of ``mask`` if below ``ub``, else a lower bound >= ``ub``."""
        hit = self.exact.get(mask)
        if hit is not None:
            return hit[0]
        lb = self.bound(mask)
        lo = self.lower.get(mask)
        if lo is not None and lo > lb:
            lb = lo
        if lb >= ub:
            return lb
        self._tick()
        best, best_e = INF, None
        fail = INF
        for est, e, child in self._children(mask):
            limit = min(ub, best)
            if est >= limit:
                fail = min(fail, est)
                break
            r = self.costs[e] + self.value(child, limit - self.costs[e])
            if r < limit:
                best, best_e = r, e
            else:
                fail = min(fail, r)
        if best < ub:
            self.exact[mask] = (best, best_e)
            return best
        val = min(best, fail)
        self.lower[mask] = val
        return val

    def optimum(self) -> float:
        return self.value(self.root)

    def path(self, mask: int | None = None) -> list[int]:
        mask = self.root if mask is None else mask
        edges = []
        while mask:
            self.value(mask)
            _, e = self.exact[mask]
            edges.append(e)
            k = (mask & -mask).bit_length() - 1
            mask = (mask ^ (1 << k)) | self.tailmask[e]
        return edges

    def optimal_children(self, mask: int) -> list[tuple[int, int]]:
        """Branches ``(edge, child)`` of ``mask`` that keep the optimum."""
        target = self.value(mask)
        out = []
        for _, e, child in self._children(mask):
            need = target - self.costs[e]
            if self.value(child, need + 1) == need:
                out.append((e, child))
        return out

    def count_optimal(self, mask: int | None = None, memo: dict | None = None) -> int:
        mask = self.root if mask is None else mask
        memo = {} if memo is None else memo
        if mask == 0:
            return 1
        if mask not in memo:
            memo[mask] = sum(self.count_optimal(c, memo) for _, c in self.optimal_children(mask))
        return memo[mask]

    def iter_optimal(self, mask: int | None = None) -> Iterator[list[int]]:
        mask = self.root if mask is None else mask
        if mask == 0:
            yield []
            return
        for e, child in self.optimal_children(mask):
            for rest in self.iter_optimal(child):
                yield [e] + rest

    def optimal_vertex_union(self) -> set[int]:
        """Vertices present in at least one optimal selection."""
        seen: set[int] = set()
        union = {self.vertex_at[k] for k in _bits(self.root)}
        stack = [self.root]
        while stack:
            mask = stack.pop()
            if mask in seen or mask == 0:
                continue
            seen.add(mask)
            for e, child in self.optimal_children(mask):
                union.update(self.h.edges[e].tail)
                stack.append(child)
        return union

    def search_excluding(self, nogoods: list[frozenset[int]]) -> tuple[float, list[int]] | None:
        """Best selection avoiding every no-good; exact values guide the search."""
        best: list = [INF, None]
        cuts = [set(c) for c in nogoods]

        def rec(mask: int, cost: float, chosen: list[int]) -> None:
            if mask == 0:
                sel = set(chosen)
                if not any(c <= sel for c in cuts) and cost < best[0]:
                    best[0], best[1] = cost, list(chosen)
                return
            self._tick()
            for _, e, child in self._children(mask):
                c = cost + self.costs[e]
                if c + self.value(child, best[0] - c) >= best[0]:
                    continue
                chosen.append(e)
                rec(child, c, chosen)
                chosen.pop()

        rec(self.root, 0, [])
        return None if best[1] is None else (best[0], best[1])


def _reverse_topological(h: DirectedHypergraph, verts: set[int],
                         allowed: frozenset[int] | None) -> list[int]:
    """Order ``verts`` so that every head precedes the tails of its producers."""
    succ: dict[int, set[int]] = {v: set() for v in verts}
    indeg = {v: 0 for v in verts}
    for v in verts:
        for e in h.producers(v):
            if allowed is not None and e not in allowed:
                continue
            for u in set(h.edges[e].tail):
                if u in verts and u not in succ[v]:
                    succ[v].add(u)
                    indeg[u] += 1
    ready = sorted(v for v in verts if indeg[v] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for u in sorted(succ[v]):
            indeg[u] -= 1
            if indeg[u] == 0:
                ready.append(u)
    if len(order) != len(verts):
        raise HypergraphError("hypergraph below the goal is cyclic")
    return order


# ---------------------------------------------------------------------------
# public operations

def build_ilp(h: DirectedHypergraph, goal: int, obj: Objective | None = None,
              allowed_edges: Iterable[int] | None = None,
              node_limit: int | None = None, time_limit: float | None = None) -> IlpModel:
    obj = obj or Objective.min_affixations()
    if not 0 <= goal < len(h.compounds):
        raise HypergraphError(f"goal {goal} is not a vertex")
    allowed = None if allowed_edges is None else frozenset(allowed_edges)
    usable = range(len(h.edges)) if allowed is None else allowed
    if goal not in reachable_from(h, h.seeds, usable):
        raise InfeasibleError("goal is not reachable from the seed set")
    if not is_acyclic(h):
        raise HypergraphError("the pathway program needs an acyclic hypergraph")
    return IlpModel(h, goal, obj, obj.edge_costs(h), allowed, [], node_limit, time_limit)


def _searcher(model: IlpModel) -> _PathwaySearch:
    if model._search is None:
        model._search = _PathwaySearch(model.hypergraph, model.goal, model.costs,
                                       model.allowed_edges, model.node_limit, model.time_limit)
    return model._search


def _witness(model: IlpModel, edges: list[int]) -> Witness:
    h = model.hypergraph
    w = Witness.from_edges(h, edges, model.goal, model.objective.report_value(h, edges))
    report = validate_pathway(h, w, model.goal)
    if not report.ok:
        raise AssertionError(f"solver produced an invalid witness: {report.reason}")
    return w


def solve(model: IlpModel) -> Witness:
    """Exact optimum of the program as a validated witness."""
    search = _searcher(model)
    if search.optimum() == INF:
        raise InfeasibleError("no selection satisfies the constraints")
    if model.nogoods:
        found = search.search_excluding(model.nogoods)
        if found is None:
            raise InfeasibleError("every feasible selection is cut off")
        return _witness(model, found[1])
    return _witness(model, search.path())


def add_nogood(model: IlpModel, w: Witness) -> None:
    """Cut ``sum_{e in w} x_e <= |w| - 1``."""
    model.nogoods.append(frozenset(w.selected_edges))


def enumerate_optimal_witnesses(model: IlpModel, limit: int) -> list[Witness]:
    """All optimal witnesses (distinct edge sets), up to ``limit``.

    Re-solves with a no-good cut per found witness and stops when the next
    solution is worse than the optimum.
    """
    if limit <= 0:
        return []
    search = _searcher(model)
    opt = search.optimum()
    if opt == INF:
        raise InfeasibleError("no selection satisfies the constraints")
    out: list[Witness] = []
    while len(out) < limit:
        found = search.search_excluding(model.nogoods)
        if found is None or found[0] > opt:
            break
        w = _witness(model, found[1])
        out.append(w)
        add_nogood(model, w)
    return out


def count_optimal_witnesses(model: IlpModel) -> int:
    """Number of distinct optimal edge sets (no enumeration)."""
    return _searcher(model).count_optimal()


def optimal_vertex_union(model: IlpModel) -> set[int]:
    return _searcher(model).optimal_vertex_union()


def pathway_optimum(h: DirectedHypergraph, goal: int, obj: Objective | None = None,
                    allowed_edges: Iterable[int] | None = None) -> int:
    """Optimal objective value (reported units) for ``goal``."""
    return solve(build_ilp(h, goal, obj, allowed_edges)).objective


def assembly_index(target, rule="split", opts=None) -> int:
    """Minimum number of affixations needed to assemble ``target``."""
    from .rewrite import expand

    exp = expand(target, rule, opts)
    model = build_ilp(exp.hypergraph, exp.target, Objective.min_affixations())
    return solve(model).affixation_count


def brute_force_assembly_index(target, rule="split", cap: int = 8) -> int:
    from .oracle import forward_assembly_index

    return forward_assembly_index(target, rule, cap)
