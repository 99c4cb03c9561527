"""Forward-assembly brute force for small targets.

Shares no code with the expansion engine or the pathway solver: compounds are
built up from seeds by joining (vertex identification or a new bond),
cyclizations are free, and a breadth-first search over *sets* of available
compounds finds the fewest joins after which the target is available.
Intermediates are pruned to those that still map into the target.
"""

from __future__ import annotations

from functools import lru_cache

from .molgraph import LabeledGraph, canonical_form, graph_from_code
from .rewrite import RuleKind, disjoint_union, identify_vertices


class CapExceededError(RuntimeError):
    pass


def _maps_into(x: LabeledGraph, t: LabeledGraph, injective_vertices: bool) -> bool:
    """Label-preserving homomorphism ``x -> t`` that is injective on edges.

    With ``injective_vertices`` this is subgraph containment.
    """
    t_bond = {}
    for i, j, b in t.edges:
        t_bond[(i, j)] = t_bond[(j, i)] = b
    order = sorted(range(x.n_vertices), key=lambda v: -x.degree(v))
    # grow the assignment along edges so partial checks bite early
    seen = set()
    bfs = []
    for s in order:
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            v = queue.pop(0)
            bfs.append(v)
            for u, _ in x.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    phi: dict[int, int] = {}
    used_edges: set[tuple[int, int]] = set()
    used_vertices: set[int] = set()

    def rec(k: int) -> bool:
        if k == len(bfs):
            return True
        v = bfs[k]
        for c in range(t.n_vertices):
            if t.labels[c] != x.labels[v]:
                continue
            if injective_vertices and c in used_vertices:
                continue
            added = []
            ok = True
            for u, b in x.adjacency[v]:
                if u not in phi:
                    continue
                key = (min(c, phi[u]), max(c, phi[u]))
                if t_bond.get(key) != b or key in used_edges:
                    ok = False
                    break
                used_edges.add(key)
                added.append(key)
            if ok:
                phi[v] = c
                used_vertices.add(c)
                if rec(k + 1):
                    return True
                del phi[v]
                used_vertices.discard(c)
            for key in added:
                used_edges.discard(key)
        return False

    return rec(0)


class _Forward:
    def __init__(self, target: LabeledGraph, rule: RuleKind):
        self.t = target
        self.rule = rule
        self.bonds = sorted({b for _, _, b in target.edges})
        self.target_code = canonical_form(target)

    @lru_cache(maxsize=None)
    def fits(self, code: bytes) -> bool:
        g = graph_from_code(code)
        if g.n_edges > self.t.n_edges:
            return False
        if self.rule is RuleKind.EDGE_REMOVAL and g.n_vertices > self.t.n_vertices:
            return False
        return _maps_into(g, self.t, self.rule is RuleKind.EDGE_REMOVAL)

    def seeds(self) -> set[bytes]:
        if self.rule is RuleKind.VERTEX_SPLIT:
            pieces = {LabeledGraph((self.t.labels[i], self.t.labels[j]), ((0, 1, b),))
                      for i, j, b in self.t.edges}
        else:
            pieces = {LabeledGraph((s,)) for s in self.t.labels}
        return {canonical_form(p) for p in pieces}

    def _links(self, g: LabeledGraph, split_at: int | None) -> set[bytes]:
        """Graphs from ``g`` by one identification / new bond; ``split_at`` separates two parts."""
        out = set()
        n = g.n_vertices
        for u in range(n):
            for v in range(u + 1, n):
                across = split_at is not None and u < split_at <= v
                if split_at is not None and not across:
                    continue
                if self.rule is RuleKind.VERTEX_SPLIT:
                    merged = identify_vertices(g, u, v)
                    cands = [] if merged is None else [merged]
                else:
                    if any(w == v for w, _ in g.adjacency[u]):
                        continue
                    cands = [LabeledGraph(g.labels, g.edges + ((u, v, b),)) for b in self.bonds]
                for c in cands:
                    code = canonical_form(c)
                    if self.fits(code):
                        out.add(code)
        return out

    @lru_cache(maxsize=None)
    def cyclizations(self, code: bytes) -> frozenset[bytes]:
        return frozenset(self._links(graph_from_code(code), None))

    @lru_cache(maxsize=None)
    def joins(self, a: bytes, b: bytes) -> frozenset[bytes]:
        ga, gb = graph_from_code(a), graph_from_code(b)
        return frozenset(self._links(disjoint_union(ga, gb), ga.n_vertices))

    def close(self, state: set[bytes]) -> frozenset[bytes]:
        stack = list(state)
        state = set(state)
        while stack:
            c = stack.pop()
            for d in self.cyclizations(c):
                if d not in state:
                    state.add(d)
                    stack.append(d)
        return frozenset(state)


def forward_assembly_index(target: LabeledGraph, rule: RuleKind | str = RuleKind.VERTEX_SPLIT,
                           cap: int = 8, max_states: int = 2_000_000) -> int:
    """Fewest joins that make ``target`` available, by breadth-first search."""
    rule = RuleKind.parse(rule)
    if not target.is_connected():
        raise ValueError("target must be connected")
    fw = _Forward(target, rule)
    layer = {fw.close(fw.seeds())}
    seen = set(layer)
    for k in range(cap + 1):
        if any(fw.target_code in s for s in layer):
            return k
        nxt = set()
        for state in layer:
            items = sorted(state)
            for i, a in enumerate(items):
                for b in items[i:]:
                    for c in fw.joins(a, b):
                        if c in state:
                            continue
                        new = fw.close(state | {c})
                        if new not in seen:
                            seen.add(new)
                            nxt.add(new)
                            if len(seen) > max_states:
                                raise CapExceededError("state space too large")
        layer = nxt
        if not layer:
            break
    raise CapExceededError(f"target not assembled within {cap} joins")
