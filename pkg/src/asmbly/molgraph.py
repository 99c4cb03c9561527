"""Hydrogen-suppressed molecular graphs.

Graphs are immutable value objects.  Isomorphism is decided through an exact
canonical code computed by colour refinement plus individualisation
backtracking with automorphism pruning.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache

BOND_ORDERS = ("single", "double", "triple", "aromatic")
_ORDER_BY_INT = {1: "single", 2: "double", 3: "triple", 4: "aromatic"}
_INT_BY_ORDER = {v: k for k, v in _ORDER_BY_INT.items()}


class GraphError(ValueError):
    """Structurally invalid graph."""


class ParseError(ValueError):
    """Malformed graph text or SMILES string."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class LabeledGraph:
    """Vertex- and edge-labelled undirected graph.

    ``labels[i]`` is the atom symbol of vertex ``i``; ``edges`` holds
    ``(i, j, bond)`` triples with ``i < j``.  Parallel edges are allowed by the
    model (parsers reject them); self-loops are not.
    """

    labels: tuple[str, ...]
    edges: tuple[tuple[int, int, str], ...] = ()

    def __post_init__(self) -> None:
        n = len(self.labels)
        norm = []
        for i, j, bond in self.edges:
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) references a missing vertex")
            if bond not in _INT_BY_ORDER:
                raise GraphError(f"unknown bond label {bond!r}")
            norm.append((i, j, bond) if i < j else (j, i, bond))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, str], ...], ...]:
        adj: list[list[tuple[int, str]]] = [[] for _ in self.labels]
        for i, j, bond in self.edges:
            adj[i].append((j, bond))
            adj[j].append((i, bond))
        return tuple(tuple(a) for a in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def is_connected(self) -> bool:
        return self.n_vertices > 0 and len(_component_ids(self)[1]) == 1

    def atom_counts(self) -> Counter:
        return Counter(self.labels)

    @cached_property
    def code(self) -> bytes:
        return canonical_form(self)

    def to_text(self) -> str:
        """Serialise to the edge-list text format."""
        lines = [f"{sym} {i}" for i, sym in enumerate(self.labels)]
        lines += [f"b {i} {j} {_INT_BY_ORDER[b]}" for i, j, b in self.edges]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "atoms": list(self.labels),
            "bonds": [[i, j, _INT_BY_ORDER[b]] for i, j, b in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> LabeledGraph:
        return cls(
            tuple(data["atoms"]),
            tuple((i, j, _ORDER_BY_INT[o]) for i, j, o in data["bonds"]),
        )


# ---------------------------------------------------------------------------
# parsing

def parse_graph_text(text: str) -> LabeledGraph:
    """Parse the line-oriented edge-list format.

    ``<SYMBOL> <index>`` declares a vertex, ``b <i> <j> <order>`` a bond with
    order 1-4 (4 = aromatic); ``#`` starts a comment.  Internal vertex ids
    follow the order of declaration.
    """
    ids: dict[str, int] = {}
    labels: list[str] = []
    edges: list[tuple[int, int, str]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "b":
            if len(parts) != 4:
                raise ParseError("bond record needs 'b <i> <j> <order>'", lineno)
            _, a, b, order = parts
            for ref in (a, b):
                if ref not in ids:
                    raise ParseError(f"bond references undeclared vertex {ref}", lineno)
            try:
                bond = _ORDER_BY_INT[int(order)]
            except (ValueError, KeyError):
                raise ParseError(f"bond order must be 1-4, got {order!r}", lineno) from None
            i, j = ids[a], ids[b]
            if i == j:
                raise ParseError(f"self-loop on vertex {a}", lineno)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ParseError(f"duplicate bond between {a} and {b}", lineno)
            seen.add(key)
            edges.append((i, j, bond))
        elif len(parts) == 2 and re.fullmatch(r"[A-Z][a-z]?", parts[0]):
            sym, ref = parts
            if not re.fullmatch(r"\d+", ref):
                raise ParseError(f"vertex index must be a non-negative integer, got {ref!r}", lineno)
            if ref in ids:
                raise ParseError(f"vertex {ref} declared twice", lineno)
            ids[ref] = len(labels)
            labels.append(sym)
        else:
            raise ParseError(f"cannot parse record {line!r}", lineno)
    return LabeledGraph(tuple(labels), tuple(edges))


_SMILES_TOKEN = re.compile(r"Cl|Br|[BCNOPSFI]|[bcnops]|%\d\d|\d|[()=#\-:]")
_SMILES_BONDS = {"-": "single", "=": "double", "#": "triple", ":": "aromatic"}


def parse_smiles(text: str) -> LabeledGraph:
    """Parse a small SMILES subset into a heavy-atom graph.

    Supported: organic-subset atoms (lowercase aromatic forms too), branches,
    ring-closure digits and the bond symbols ``- = # :``.  Hydrogens stay
    implicit.
    """
    labels: list[str] = []
    aromatic: list[bool] = []
    edges: list[tuple[int, int, str]] = []
    seen: set[tuple[int, int]] = set()
    stack: list[int] = []
    rings: dict[str, tuple[int, str | None]] = {}
    prev: int | None = None
    bond: str | None = None
    pos = 0
    s = text.strip()

    def connect(a: int, b: int, sym: str | None) -> None:
        if sym is None:
            sym = "aromatic" if aromatic[a] and aromatic[b] else "single"
        key = (min(a, b), max(a, b))
        if a == b or key in seen:
            raise ParseError(f"invalid ring closure at position {pos}")
        seen.add(key)
        edges.append((a, b, sym))

    while pos < len(s):
        m = _SMILES_TOKEN.match(s, pos)
        if m is None:
            raise ParseError(f"unsupported token {s[pos]!r} at position {pos}")
        tok = m.group()
        if tok in _SMILES_BONDS:
            if bond is not None:
                raise ParseError(f"two consecutive bond symbols at position {pos}")
            bond = _SMILES_BONDS[tok]
        elif tok == "(":
            if prev is None:
                raise ParseError(f"branch without a preceding atom at position {pos}")
            stack.append(prev)
        elif tok == ")":
            if not stack:
                raise ParseError(f"unmatched ')' at position {pos}")
            if bond is not None:
                raise ParseError(f"dangling bond symbol at position {pos}")
            prev = stack.pop()
        elif tok[0].isdigit() or tok[0] == "%":
            if prev is None:
                raise ParseError(f"ring digit without an atom at position {pos}")
            if tok in rings:
                other, first_bond = rings.pop(tok)
                if bond and first_bond and bond != first_bond:
                    raise ParseError(f"conflicting ring-bond symbols for {tok}")
                connect(other, prev, bond or first_bond)
            else:
                rings[tok] = (prev, bond)
            bond = None
        else:
            idx = len(labels)
            labels.append(tok.capitalize() if tok.islower() else tok)
            aromatic.append(tok.islower())
            if prev is not None:
                connect(prev, idx, bond)
            elif bond is not None:
                raise ParseError("bond symbol before the first atom")
            prev = idx
            bond = None
        pos = m.end()
    if stack:
        raise ParseError("unmatched '('")
    if rings:
        raise ParseError(f"unmatched ring-bond digit(s): {', '.join(sorted(rings))}")
    if bond is not None:
        raise ParseError("trailing bond symbol")
    if not labels:
        raise ParseError("empty SMILES")
    return LabeledGraph(tuple(labels), tuple(edges))


# ---------------------------------------------------------------------------
# elementary statistics

def _component_ids(g: LabeledGraph) -> tuple[list[int], list[list[int]]]:
    comp = [-1] * g.n_vertices
    groups: list[list[int]] = []
    adj = g.adjacency
    for start in range(g.n_vertices):
        if comp[start] >= 0:
            continue
        cid = len(groups)
        comp[start] = cid
        members = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for u, _ in adj[v]:
                if comp[u] < 0:
                    comp[u] = cid
                    members.append(u)
                    stack.append(u)
        members.sort()
        groups.append(members)
    return comp, groups


def induced_subgraph(g: LabeledGraph, vertices: list[int]) -> LabeledGraph:
    index = {v: k for k, v in enumerate(vertices)}
    return LabeledGraph(
        tuple(g.labels[v] for v in vertices),
        tuple((index[i], index[j], b) for i, j, b in g.edges if i in index and j in index),
    )


def connected_components(g: LabeledGraph) -> list[LabeledGraph]:
    """Split ``g`` into re-indexed connected components."""
    _, groups = _component_ids(g)
    if len(groups) == 1:
        return [g]
    return [induced_subgraph(g, members) for members in groups]


def cyclomatic_number(g: LabeledGraph) -> int:
    return g.n_edges - g.n_vertices + len(_component_ids(g)[1])


def is_base_compound(g: LabeledGraph) -> bool:
    return g.n_vertices == 2 and g.n_edges == 1


def relabel(g: LabeledGraph, perm: list[int]) -> LabeledGraph:
    """Return the copy of ``g`` in which vertex ``v`` becomes ``perm[v]``."""
    labels = [""] * g.n_vertices
    for v, p in enumerate(perm):
        labels[p] = g.labels[v]
    return LabeledGraph(tuple(labels), tuple((perm[i], perm[j], b) for i, j, b in g.edges))


# ---------------------------------------------------------------------------
# canonical labelling

def _refine(adj: list[list[tuple[int, int]]], colors: list[int]) -> list[int]:
    """Equitable refinement of an ordered colouring.

    Colours are cell positions (number of vertices in earlier cells), so the
    result depends only on the isomorphism class of the coloured graph.
    """
    n = len(colors)
    n_cells = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted((b, colors[u]) for u, b in adj[v])))
            for v in range(n)
        ]
        order = sorted(set(sigs))
        counts = Counter(sigs)
        start = {}
        acc = 0
        for sig in order:
            start[sig] = acc
            acc += counts[sig]
        colors = [start[sig] for sig in sigs]
        if len(order) == n_cells:
            return colors
        n_cells = len(order)


def _certificate(adj_edges: list[tuple[int, int, int]], colors: list[int]) -> tuple:
    return tuple(sorted(
        (min(colors[i], colors[j]), max(colors[i], colors[j]), b) for i, j, b in adj_edges
    ))


def _orbit_roots(gens: list[list[int]], n: int) -> list[int]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for gen in gens:
        for a, b in enumerate(gen):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return [find(x) for x in range(n)]


def _canonical_colors(g: LabeledGraph) -> tuple[list[int], tuple]:
    n = g.n_vertices
    bond_rank = {name: k for k, name in enumerate(BOND_ORDERS)}
    adj = [[(u, bond_rank[b]) for u, b in nbrs] for nbrs in g.adjacency]
    edges = [(i, j, bond_rank[b]) for i, j, b in g.edges]
    symbols = sorted(set(g.labels))
    first = {s: sum(1 for x in g.labels if x < s) for s in symbols}
    root = _refine(adj, [first[s] for s in g.labels])

    best: list = [None, None]  # certificate, leaf colouring
    automorphisms: list[list[int]] = []

    def search(colors: list[int], path: tuple[int, ...]) -> None:
        counts = Counter(colors)
        target = min((c for c, k in counts.items() if k > 1), default=None)
        if target is None:
            cert = _certificate(edges, colors)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, colors
            elif cert == best[0]:
                # leaf colourings are bijections onto 0..n-1
                inv = [0] * n
                for v, c in enumerate(best[1]):
                    inv[c] = v
                automorphisms.append([inv[colors[v]] for v in range(n)])
            return
        cell = [v for v in range(n) if colors[v] == target]
        tried: list[int] = []
        for v in cell:
            if tried:
                fixing = [a for a in automorphisms if all(a[p] == p for p in path)]
                if fixing:
                    roots = _orbit_roots(fixing, n)
                    if any(roots[v] == roots[t] for t in tried):
                        continue
            tried.append(v)
            child = [c + 1 if (c == target and u != v) else c for u, c in enumerate(colors)]
            search(_refine(adj, child), path + (v,))

    search(root, ())
    return best[1], best[0]


@lru_cache(maxsize=200_000)
def canonical_form(g: LabeledGraph) -> bytes:
    """Exact isomorphism-invariant byte code of ``g``."""
    if g.n_vertices == 0:
        return b"|"
    colors, cert = _canonical_colors(g)
    labels = [""] * g.n_vertices
    for v, c in enumerate(colors):
        labels[c] = g.labels[v]
    head = ",".join(labels)
    body = ";".join(f"{i}-{j}:{b}" for i, j, b in cert)
    return f"{head}|{body}".encode()


def canonical_graph(g: LabeledGraph) -> LabeledGraph:
    """Representative of ``g``'s isomorphism class with canonical numbering."""
    colors, _ = _canonical_colors(g) if g.n_vertices else ([], ())
    return relabel(g, colors)


def graph_from_code(code: bytes) -> LabeledGraph:
    head, body = code.decode().split("|")
    labels = tuple(head.split(",")) if head else ()
    edges = []
    if body:
        for item in body.split(";"):
            ij, b = item.split(":")
            i, j = ij.split("-")
            edges.append((int(i), int(j), BOND_ORDERS[int(b)]))
    return LabeledGraph(labels, tuple(edges))


def is_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    if (g1.n_vertices, g1.n_edges) != (g2.n_vertices, g2.n_edges):
        return False
    if g1.atom_counts() != g2.atom_counts():
        return False
    return canonical_form(g1) == canonical_form(g2)
