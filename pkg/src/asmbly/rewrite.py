"""Disassembly rules and the expansion of a target's disassembly hypergraph.

Two rules are supported:

* vertex split: duplicate one vertex and distribute its incident edges over
  the two copies (inverse: identify two equally labelled vertices);
* edge removal: delete one bond (inverse: add a bond).

A step that leaves the compound connected is an inverse cyclization, one that
disconnects it an inverse affixation.
"""

from __future__ import annotations

import enum
import time
from collections import deque
from dataclasses import dataclass, field

from .hypergraph import AFFIXATION, CYCLIZATION, DirectedHypergraph
from .molgraph import (
    LabeledGraph,
    canonical_form,
    connected_components,
    is_base_compound,
)


class RuleKind(enum.Enum):
    VERTEX_SPLIT = "split"
    EDGE_REMOVAL = "edge"

    @classmethod
    def parse(cls, value: str | RuleKind) -> RuleKind:
        if isinstance(value, cls):
            return value
        aliases = {"split": cls.VERTEX_SPLIT, "vertexsplit": cls.VERTEX_SPLIT,
                   "edge": cls.EDGE_REMOVAL, "edgeremoval": cls.EDGE_REMOVAL}
        try:
            return aliases[str(value).lower().replace("_", "").replace("-", "")]
        except KeyError:
            raise ValueError(f"unknown rule {value!r}; use 'split' or 'edge'") from None


class StepKind(enum.Enum):
    CYCLIZATION = "cyclization"
    AFFIXATION = "affixation"


class DegenerateInputError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class DisassemblyStep:
    parent: LabeledGraph
    fragments: tuple[LabeledGraph, ...]
    kind: StepKind
    site: str

    @property
    def fragment_codes(self) -> tuple[bytes, ...]:
        return tuple(sorted(canonical_form(f) for f in self.fragments))


@dataclass
class ExpansionOptions:
    max_compounds: int | None = None
    max_edges: int | None = None
    time_budget: float | None = None
    cyclization_only: bool = False


def _split_components(parent: LabeledGraph, g: LabeledGraph, site: str,
                      steps: dict) -> None:
    parts = connected_components(g)
    frags = tuple(sorted(parts, key=canonical_form))
    key = tuple(canonical_form(f) for f in frags)
    if key in steps:
        return
    kind = StepKind.CYCLIZATION if len(parts) == 1 else StepKind.AFFIXATION
    steps[key] = DisassemblyStep(parent, frags, kind, site)


def enumerate_vertex_splits(g: LabeledGraph) -> list[DisassemblyStep]:
    """All distinct vertex splits of a connected compound, up to isomorphism."""
    if g.n_vertices < 2 or is_base_compound(g):
        raise DegenerateInputError("vertex splits need a compound with at least two bonds")
    if not g.is_connected():
        raise DegenerateInputError("vertex splits need a connected compound")
    steps: dict = {}
    n = g.n_vertices
    for v in range(n):
        incident = [k for k, (i, j, _) in enumerate(g.edges) if v in (i, j)]
        d = len(incident)
        if d < 2:
            continue
        # the first incident edge always stays on v, so each bipartition is seen once
        for mask in range(1, 1 << (d - 1)):
            moved = {incident[t + 1] for t in range(d - 1) if mask >> t & 1}
            edges = []
            for k, (i, j, b) in enumerate(g.edges):
                if k in moved:
                    i, j = (n, j) if i == v else (i, n)
                edges.append((i, j, b))
            split = LabeledGraph(g.labels + (g.labels[v],), tuple(edges))
            _split_components(g, split, f"split v{v} moving edges {sorted(moved)}", steps)
    return list(steps.values())


def enumerate_edge_removals(g: LabeledGraph) -> list[DisassemblyStep]:
    """All distinct single-bond removals of a connected compound, up to isomorphism."""
    if g.n_edges == 0:
        raise DegenerateInputError("edge removal needs at least one bond")
    steps: dict = {}
    for k in range(g.n_edges):
        rest = LabeledGraph(g.labels, g.edges[:k] + g.edges[k + 1:])
        i, j, _ = g.edges[k]
        _split_components(g, rest, f"remove bond {i}-{j}", steps)
    return list(steps.values())


def enumerate_steps(g: LabeledGraph, rule: RuleKind) -> list[DisassemblyStep]:
    if rule is RuleKind.VERTEX_SPLIT:
        return enumerate_vertex_splits(g)
    return enumerate_edge_removals(g)


def is_terminal(g: LabeledGraph, rule: RuleKind) -> bool:
    """Compounds that are never disassembled further (the seed set)."""
    if rule is RuleKind.VERTEX_SPLIT:
        return is_base_compound(g) or g.n_vertices == 1
    return g.n_vertices == 1


# ---------------------------------------------------------------------------
# forward (assembly) direction

def identify_vertices(g: LabeledGraph, keep: int, drop: int) -> LabeledGraph | None:
    """Merge ``drop`` into ``keep``; ``None`` if the result would not be simple."""
    if keep == drop or g.labels[keep] != g.labels[drop]:
        return None
    nbrs_keep = {u for u, _ in g.adjacency[keep]}
    nbrs_drop = {u for u, _ in g.adjacency[drop]}
    if keep in nbrs_drop or nbrs_keep & nbrs_drop:
        return None
    index = [v - (v > drop) for v in range(g.n_vertices)]
    index[drop] = index[keep]
    labels = tuple(s for v, s in enumerate(g.labels) if v != drop)
    return LabeledGraph(labels, tuple((index[i], index[j], b) for i, j, b in g.edges))


def disjoint_union(a: LabeledGraph, b: LabeledGraph) -> LabeledGraph:
    off = a.n_vertices
    return LabeledGraph(a.labels + b.labels,
                        a.edges + tuple((i + off, j + off, x) for i, j, x in b.edges))


def replay_step(step: DisassemblyStep, rule: RuleKind) -> list[LabeledGraph]:
    """All graphs obtainable by applying the inverse rule once to the fragments."""
    if len(step.fragments) == 1:
        g = step.fragments[0]
    else:
        g = disjoint_union(*step.fragments)
    out = []
    n = g.n_vertices
    if rule is RuleKind.VERTEX_SPLIT:
        for u in range(n):
            for v in range(u + 1, n):
                merged = identify_vertices(g, u, v)
                if merged is not None and merged.is_connected():
                    out.append(merged)
    else:
        present = {(i, j) for i, j, _ in g.edges}
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) in present:
                    continue
                for bond in {b for _, _, b in step.parent.edges}:
                    h = LabeledGraph(g.labels, g.edges + ((u, v, bond),))
                    if h.is_connected():
                        out.append(h)
    return out


# ---------------------------------------------------------------------------
# expansion

@dataclass
class Expansion:
    """The expanded hypergraph plus bookkeeping about how it was built."""

    hypergraph: DirectedHypergraph
    target: int
    rule: RuleKind
    steps_examined: int = 0
    elapsed: float = 0.0
    notes: list[str] = field(default_factory=list)


def expand(target: LabeledGraph, rule: RuleKind | str = RuleKind.VERTEX_SPLIT,
           opts: ExpansionOptions | None = None) -> Expansion:
    """Breadth-first disassembly closure of ``target``.

    Every distinct step becomes one hyperedge ``fragments -> parent`` with
    weight 1 (affixation) or 0 (cyclization).  Terminal compounds form the
    seed set.  Under ``cyclization_only`` affixation steps are ignored and the
    compounds without further cyclization steps become the seeds.
    """
    rule = RuleKind.parse(rule)
    opts = opts or ExpansionOptions()
    if not target.is_connected():
        raise DegenerateInputError("target must be a connected compound")
    if rule is RuleKind.VERTEX_SPLIT and target.n_vertices == 1:
        raise DegenerateInputError("a single atom has no vertex-split disassembly")
    started = time.monotonic()
    h = DirectedHypergraph()
    root, _ = h.intern(target)
    queue = deque([root])
    examined = 0
    # edge count bounds the vertex count of every split fragment
    vertex_bound = max(2 * target.n_edges, target.n_vertices)
    while queue:
        v = queue.popleft()
        g = h.graph(v)
        if is_terminal(g, rule):
            h.seeds.add(v)
            continue
        steps = enumerate_steps(g, rule)
        if opts.cyclization_only:
            steps = [s for s in steps if s.kind is StepKind.CYCLIZATION]
            if not steps:
                h.seeds.add(v)
                continue
        for step in steps:
            examined += 1
            tail = []
            for frag in step.fragments:
                if frag.n_vertices > vertex_bound:
                    raise RuntimeError("fragment exceeds the monotone size bound")
                fid, created = h.intern(frag)
                if created:
                    queue.append(fid)
                tail.append(fid)
            weight = CYCLIZATION if step.kind is StepKind.CYCLIZATION else AFFIXATION
            h.add_edge(tail, (v,), weight, rule.value)
        if opts.max_compounds is not None and len(h.compounds) > opts.max_compounds:
            raise ResourceLimitError(f"more than {opts.max_compounds} compounds")
        if opts.max_edges is not None and len(h.edges) > opts.max_edges:
            raise ResourceLimitError(f"more than {opts.max_edges} hyperedges")
        if opts.time_budget is not None and time.monotonic() - started > opts.time_budget:
            raise ResourceLimitError(f"expansion exceeded {opts.time_budget} s")
    return Expansion(h, root, rule, examined, time.monotonic() - started)


def decyclization_closure(target: LabeledGraph, opts: ExpansionOptions | None = None,
                          include_target: bool = True) -> list[LabeledGraph]:
    """Compounds reachable from ``target`` by inverse cyclizations only.

    The target itself counts as reachable (zero steps) unless
    ``include_target`` is false.  Returned in canonical-code order, one
    representative per isomorphism class.
    """
    opts = ExpansionOptions(**{**(opts or ExpansionOptions()).__dict__, "cyclization_only": True})
    exp = expand(target, RuleKind.VERTEX_SPLIT, opts)
    h = exp.hypergraph
    others = [v for v in h.vertices if include_target or v != exp.target]
    return [h.graph(v) for v in sorted(others, key=lambda v: h.compounds[v].code)]
