"""Directed multi-hypergraphs over interned compounds.

Hyperedges are stored in assembly orientation: the tail holds the fragments,
the head the assembled compound(s).  Vertex ids are dense integers assigned in
insertion order.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .molgraph import LabeledGraph, canonical_form, graph_from_code

AFFIXATION = 1
CYCLIZATION = 0


class HypergraphError(ValueError):
    pass


class UnreachableTargetError(HypergraphError):
    """The target cannot be assembled from the seed set."""


@dataclass(frozen=True)
class Compound:
    id: int
    code: bytes
    graph: LabeledGraph | None = None

    @property
    def name(self) -> str:
        return f"v{self.id}"


@dataclass(frozen=True)
class Hyperedge:
    tail: tuple[int, ...]
    head: tuple[int, ...]
    weight: int = AFFIXATION
    rule: str = ""

    def __post_init__(self) -> None:
        if not self.tail or not self.head:
            raise HypergraphError("hyperedges need a nonempty tail and head")
        if self.weight not in (0, 1):
            raise HypergraphError(f"edge weight must be 0 or 1, got {self.weight}")
        object.__setattr__(self, "tail", tuple(sorted(self.tail)))
        object.__setattr__(self, "head", tuple(sorted(self.head)))

    @property
    def is_b_edge(self) -> bool:
        return len(self.head) == 1


class DirectedHypergraph:
    """Append-only hypergraph with compound interning by canonical code."""

    def __init__(self) -> None:
        self.compounds: list[Compound] = []
        self.edges: list[Hyperedge] = []
        self.seeds: set[int] = set()
        self._by_code: dict[bytes, int] = {}
        self._producers: list[list[int]] = []
        self._consumers: list[list[int]] = []

    # -- construction -----------------------------------------------------
    def intern(self, graph: LabeledGraph | None = None, code: bytes | None = None) -> tuple[int, bool]:
        """Return ``(id, created)`` for the compound with this graph or code."""
        if code is None:
            if graph is None:
                raise HypergraphError("need a graph or a code")
            code = canonical_form(graph)
        vid = self._by_code.get(code)
        if vid is not None:
            return vid, False
        vid = len(self.compounds)
        self.compounds.append(Compound(vid, code, graph))
        self._by_code[code] = vid
        self._producers.append([])
        self._consumers.append([])
        return vid, True

    def add_vertex(self, graph: LabeledGraph | None = None, code: bytes | None = None) -> int:
        return self.intern(graph, code)[0]

    def add_edge(self, tail: Iterable[int], head: Iterable[int], weight: int = AFFIXATION,
                 rule: str = "") -> int:
        edge = Hyperedge(tuple(tail), tuple(head), weight, rule)
        n = len(self.compounds)
        for v in edge.tail + edge.head:
            if not 0 <= v < n:
                raise HypergraphError(f"edge references unknown vertex {v}")
        eid = len(self.edges)
        self.edges.append(edge)
        for v in set(edge.head):
            self._producers[v].append(eid)
        for v in set(edge.tail):
            self._consumers[v].append(eid)
        return eid

    # -- queries ----------------------------------------------------------
    def __len__(self) -> int:
        return len(self.compounds)

    @property
    def vertices(self) -> range:
        return range(len(self.compounds))

    def lookup(self, graph: LabeledGraph) -> int | None:
        return self._by_code.get(canonical_form(graph))

    def graph(self, v: int) -> LabeledGraph:
        c = self.compounds[v]
        return c.graph if c.graph is not None else graph_from_code(c.code)

    def producers(self, v: int) -> list[int]:
        """Edges with ``v`` in the head."""
        return self._producers[v]

    def consumers(self, v: int) -> list[int]:
        """Edges with ``v`` in the tail."""
        return self._consumers[v]

    def is_b_hypergraph(self) -> bool:
        return all(e.is_b_edge for e in self.edges)

    def summary(self) -> str:
        return f"vertices={len(self.compounds)} edges={len(self.edges)} seeds={len(self.seeds)}"

    def subhypergraph(self, vertices: Iterable[int], edges: Iterable[int]) -> tuple[DirectedHypergraph, dict[int, int], dict[int, int]]:
        """Copy of the induced piece; returns it with old->new vertex and edge maps."""
        sub = DirectedHypergraph()
        vmap: dict[int, int] = {}
        for v in sorted(set(vertices)):
            c = self.compounds[v]
            vmap[v] = sub.add_vertex(c.graph, c.code)
        emap: dict[int, int] = {}
        for eid in sorted(set(edges)):
            e = self.edges[eid]
            emap[eid] = sub.add_edge([vmap[u] for u in e.tail], [vmap[u] for u in e.head], e.weight, e.rule)
        sub.seeds = {vmap[s] for s in self.seeds if s in vmap}
        return sub, vmap, emap

    # -- serialisation ----------------------------------------------------
    def _graph_or_none(self, v: int) -> dict | None:
        # abstract vertices (test fixtures) carry a plain label instead of a graph code
        try:
            return self.graph(v).to_dict()
        except (ValueError, IndexError):
            return None

    def to_json(self) -> str:
        data = {
            "vertices": [
                {
                    "id": c.id,
                    "code": c.code.decode(),
                    "graph": self._graph_or_none(c.id),
                }
                for c in self.compounds
            ],
            "edges": [
                {"tail": list(e.tail), "head": list(e.head), "w": e.weight, "rule": e.rule}
                for e in self.edges
            ],
            "seeds": sorted(self.seeds),
        }
        return json.dumps(data, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> DirectedHypergraph:
        data = json.loads(text)
        h = cls()
        for k, item in enumerate(sorted(data["vertices"], key=lambda d: d["id"])):
            if item["id"] != k:
                raise HypergraphError("vertex ids must be dense and start at 0")
            graph = LabeledGraph.from_dict(item["graph"]) if item.get("graph") else None
            code = item["code"].encode() if "code" in item else None
            vid, created = h.intern(graph, code)
            if not created:
                raise HypergraphError(f"duplicate compound for vertex {k}")
        for e in data["edges"]:
            h.add_edge(e["tail"], e["head"], e.get("w", AFFIXATION), e.get("rule", ""))
        h.seeds = set(data.get("seeds", []))
        return h


@dataclass
class Witness:
    """A selected sub-hypergraph certifying an assembly pathway."""

    selected_edges: tuple[int, ...]
    selected_vertices: tuple[int, ...]
    order: tuple[int, ...] = ()
    objective: Fraction | int = 0
    affixation_count: int = 0
    cyclization_count: int = 0

    @classmethod
    def from_edges(cls, h: DirectedHypergraph, edges: Iterable[int], target: int,
                   objective: Fraction | int | None = None) -> Witness:
        edges = tuple(sorted(set(edges)))
        verts = {target}
        for eid in edges:
            verts.update(h.edges[eid].tail)
            verts.update(h.edges[eid].head)
        aff = sum(h.edges[eid].weight for eid in edges)
        w = cls(edges, tuple(sorted(verts)), (), aff if objective is None else objective,
                aff, len(edges) - aff)
        report = validate_pathway(h, w, target)
        if report.ok:
            w.order = report.order
        return w

    def to_dict(self) -> dict:
        return {
            "selected_edges": list(self.selected_edges),
            "selected_vertices": list(self.selected_vertices),
            "order": list(self.order),
            "objective": str(self.objective),
            "affixation_count": self.affixation_count,
            "cyclization_count": self.cyclization_count,
        }


@dataclass
class ValidationReport:
    ok: bool
    reason: str = ""
    order: tuple[int, ...] = ()
    stuck: tuple[int, ...] = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# reachability and structure

def reachable_from(h: DirectedHypergraph, sources: Iterable[int],
                   edges: Iterable[int] | None = None) -> set[int]:
    """B-closure of ``sources``: heads of edges whose whole tail is reached."""
    reached = set(sources)
    pool = range(len(h.edges)) if edges is None else edges
    missing = {}
    waiting: dict[int, list[int]] = {}
    queue = deque(reached)
    for eid in pool:
        tail = set(h.edges[eid].tail)
        missing[eid] = len(tail - reached)
        for v in tail - reached:
            waiting.setdefault(v, []).append(eid)
        if missing[eid] == 0:
            for x in h.edges[eid].head:
                if x not in reached:
                    reached.add(x)
                    queue.append(x)
    while queue:
        v = queue.popleft()
        for eid in waiting.pop(v, ()):
            missing[eid] -= 1
            if missing[eid] == 0:
                for x in h.edges[eid].head:
                    if x not in reached:
                        reached.add(x)
                        queue.append(x)
    return reached


def is_grounded(h: DirectedHypergraph, sources: Iterable[int]) -> bool:
    return len(reachable_from(h, sources)) == len(h.compounds)


def is_acyclic(h: DirectedHypergraph) -> bool:
    """Kahn's algorithm on the bipartite vertex/edge incidence digraph."""
    n = len(h.compounds)
    indeg = [0] * (n + len(h.edges))
    succ: list[list[int]] = [[] for _ in indeg]
    for eid, e in enumerate(h.edges):
        node = n + eid
        for v in set(e.tail):
            succ[v].append(node)
            indeg[node] += 1
        for v in set(e.head):
            succ[node].append(v)
            indeg[v] += 1
    queue = deque(i for i, d in enumerate(indeg) if d == 0)
    seen = 0
    while queue:
        x = queue.popleft()
        seen += 1
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return seen == len(indeg)


def topological_vertices(h: DirectedHypergraph) -> list[int]:
    """Vertices ordered so every tail vertex precedes the heads of its edges."""
    n = len(h.compounds)
    indeg = [0] * n
    succ: list[set[int]] = [set() for _ in range(n)]
    for e in h.edges:
        for u in set(e.tail):
            for x in set(e.head):
                if x not in succ[u]:
                    succ[u].add(x)
                    indeg[x] += 1
    queue = deque(v for v in range(n) if indeg[v] == 0)
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for x in sorted(succ[v]):
            indeg[x] -= 1
            if indeg[x] == 0:
                queue.append(x)
    if len(order) != n:
        raise HypergraphError("hypergraph is cyclic")
    return order


def ancestors(h: DirectedHypergraph, x: int) -> set[int]:
    """All ``z`` with a (vertex-level) hyperpath from ``z`` to ``x``, plus ``x``."""
    below = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        for eid in h.producers(v):
            for u in h.edges[eid].tail:
                if u not in below:
                    below.add(u)
                    stack.append(u)
    return below


def restrict_below(h: DirectedHypergraph, x: int) -> DirectedHypergraph:
    """The rooted sub-hypergraph of edges on paths that end in ``x``."""
    below = ancestors(h, x)
    kept = [
        eid for eid, e in enumerate(h.edges)
        if all(z in below for z in e.tail) and any(y in below for y in e.head)
    ]
    verts = {x}
    for eid in kept:
        verts.update(h.edges[eid].tail)
        verts.update(h.edges[eid].head)
    sub, _, _ = h.subhypergraph(verts, kept)
    return sub


def minimal_vertices(h: DirectedHypergraph) -> set[int]:
    """Vertices not reachable from any other vertex."""
    has_pred = set()
    for e in h.edges:
        for x in e.head:
            if any(u != x for u in e.tail):
                has_pred.add(x)
    return set(h.vertices) - has_pred


def to_b_hypergraph(h: DirectedHypergraph) -> DirectedHypergraph:
    """Replace each edge by one single-head edge per head entry (with multiplicity)."""
    b = DirectedHypergraph()
    for c in h.compounds:
        b.add_vertex(c.graph, c.code)
    for e in h.edges:
        for x in e.head:
            b.add_edge(e.tail, (x,), e.weight, e.rule)
    b.seeds = set(h.seeds)
    return b


def b_edge_origins(h: DirectedHypergraph) -> list[int]:
    """For each edge of ``to_b_hypergraph(h)``, the index of its source edge in ``h``."""
    return [eid for eid, e in enumerate(h.edges) for _ in e.head]


# ---------------------------------------------------------------------------
# pathway validation

def realizability_order(h: DirectedHypergraph, edges: Iterable[int],
                        seeds: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Greedy marking; returns ``(order, stuck_edges)``."""
    available = set(seeds)
    pending = sorted(set(edges))
    order: list[int] = []
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for eid in pending:
            if all(u in available for u in h.edges[eid].tail):
                order.append(eid)
                available.update(h.edges[eid].head)
                progress = True
            else:
                rest.append(eid)
        pending = rest
    return tuple(order), tuple(pending)


def validate_pathway(h: DirectedHypergraph, w: Witness, target: int) -> ValidationReport:
    """Check that a witness is a realizable assembly pathway for ``target``."""
    verts = set(w.selected_vertices)
    for eid in w.selected_edges:
        if not 0 <= eid < len(h.edges):
            return ValidationReport(False, f"unknown edge {eid}")
        e = h.edges[eid]
        if not set(e.tail + e.head) <= verts:
            return ValidationReport(False, f"edge {eid} has endpoints outside the selection")
    if target not in verts:
        return ValidationReport(False, "target not selected")
    for eid in w.selected_edges:
        if target in h.edges[eid].tail:
            return ValidationReport(False, f"target is consumed by edge {eid}, not maximal")
    seeds = verts & h.seeds
    if reachable_from(h, seeds, w.selected_edges) != verts:
        return ValidationReport(False, "selection is not grounded in the seed set")
    order, stuck = realizability_order(h, w.selected_edges, seeds)
    if stuck:
        return ValidationReport(False, "no realizability order", order, stuck)
    return ValidationReport(True, "", order)


def witness_depth(h: DirectedHypergraph, w: Witness) -> int:
    """Longest chain of hyperedges in the witness, seeds at depth 0."""
    depth: dict[int, int] = {}
    order, stuck = realizability_order(h, w.selected_edges, set(w.selected_vertices) & h.seeds)
    if stuck:
        raise HypergraphError("witness has no realizability order")
    best = 0
    for eid in order:
        e = h.edges[eid]
        d = 1 + max((depth.get(u, 0) for u in e.tail), default=0)
        for x in e.head:
            depth[x] = max(depth.get(x, 0), d)
        best = max(best, d)
    return best


# ---------------------------------------------------------------------------
# minimum edge counts

def _min_edges_exhaustive(h: DirectedHypergraph, target: int, cap: int) -> int:
    useful = sorted(set().union(*(h.consumers(v) for v in ancestors(h, target))) |
                    set().union(*(h.producers(v) for v in ancestors(h, target))))
    for k in range(0, min(cap, len(useful)) + 1):
        for combo in itertools.combinations(useful, k):
            if target in reachable_from(h, h.seeds, combo):
                return k
    raise UnreachableTargetError("target is not reachable from the seed set")


def min_edge_comparison(h: DirectedHypergraph, target: int, cap: int = 12) -> tuple[int, int]:
    """Minimum pathway sizes in ``h`` and in its B-conversion.

    Multi-head hypergraphs are searched exhaustively (``cap`` bounds the edge
    count); B-hypergraphs go through the exact pathway solver.
    """
    from .ilp import Objective, build_ilp, solve

    if target not in reachable_from(h, h.seeds):
        raise UnreachableTargetError("target is not reachable from the seed set")
    hb = to_b_hypergraph(h)
    b_value = len(solve(build_ilp(hb, target, Objective.unit())).selected_edges)
    if h.is_b_hypergraph():
        return b_value, b_value
    return _min_edges_exhaustive(h, target, cap), b_value


# ---------------------------------------------------------------------------
# export

def witness_to_dot(h: DirectedHypergraph, w: Witness, target: int | None = None) -> str:
    """König (bipartite) drawing of a witness: compounds plus square edge nodes."""
    lines = ["digraph witness {", "  rankdir=BT;"]
    for v in w.selected_vertices:
        g = h.graph(v)
        label = f"v{v}\\n{''.join(sorted(g.labels))} |E|={g.n_edges}"
        attrs = [f'label="{label}"']
        if v in h.seeds:
            attrs.append("shape=box")
        if v == target:
            attrs.append("peripheries=2")
        lines.append(f"  v{v} [{', '.join(attrs)}];")
    for eid in w.selected_edges:
        e = h.edges[eid]
        color = "red" if e.weight else "blue"
        lines.append(f'  e{eid} [shape=square, label="", width=0.15, style=filled, fillcolor={color}];')
        for u, k in sorted(Counter(e.tail).items()):
            extra = f' [label="x{k}"]' if k > 1 else ""
            lines.append(f"  v{u} -> e{eid}{extra};")
        for x in e.head:
            lines.append(f"  e{eid} -> v{x};")
    lines.append("}")
    return "\n".join(lines) + "\n"
