"""Straight-line grammars read off an assembly witness.

Seeds become terminals (spelled by their canonical codes), every other
selected compound a nonterminal whose single rule lists the fragments of the
edge that assembles it.  Because the witness is acyclic, the grammar derives
exactly one string: the multiset of seeds, in a fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .hypergraph import DirectedHypergraph, HypergraphError, Witness, validate_pathway


class GrammarError(ValueError):
    pass


@dataclass
class Cfg:
    terminals: set[str]
    nonterminals: set[str]
    start: str
    rules: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.terminals & self.nonterminals:
            raise GrammarError("terminal and nonterminal symbols overlap")
        if set(self.rules) != self.nonterminals:
            raise GrammarError("every nonterminal needs exactly one rule")
        known = self.terminals | self.nonterminals
        for lhs, rhs in self.rules.items():
            if not rhs:
                raise GrammarError(f"empty right-hand side for {lhs}")
            unknown = set(rhs) - known
            if unknown:
                raise GrammarError(f"rule {lhs} uses unknown symbols {sorted(unknown)}")
        if self.start not in known:
            raise GrammarError("start symbol is not part of the grammar")
        self.topological_order()

    @property
    def rule_count(self) -> int:
        return len(self.rules)

    def size(self) -> tuple[int, int]:
        """(nonterminals, total right-hand-side length)."""
        return len(self.nonterminals), sum(len(r) for r in self.rules.values())

    def topological_order(self) -> list[str]:
        """Nonterminals, each after every nonterminal in its rule; raises on cycles."""
        state: dict[str, int] = {}
        out: list[str] = []
        for root in sorted(self.nonterminals):
            if root in state:
                continue
            stack = [(root, iter(self.rules[root]))]
            state[root] = 1
            while stack:
                sym, it = stack[-1]
                for nxt in it:
                    if nxt not in self.nonterminals:
                        continue
                    if state.get(nxt) == 1:
                        raise GrammarError(f"rule graph has a cycle through {nxt}")
                    if nxt not in state:
                        state[nxt] = 1
                        stack.append((nxt, iter(self.rules[nxt])))
                        break
                else:
                    state[sym] = 2
                    out.append(sym)
                    stack.pop()
        return out

    def restricted(self, symbol: str) -> Cfg:
        """The grammar with ``symbol`` as start and only the rules it can use."""
        keep: set[str] = set()
        stack = [symbol] if symbol in self.nonterminals else []
        while stack:
            s = stack.pop()
            if s in keep:
                continue
            keep.add(s)
            stack.extend(x for x in self.rules[s] if x in self.nonterminals)
        used_terms = {x for s in keep for x in self.rules[s] if x in self.terminals}
        if symbol in self.terminals:
            used_terms.add(symbol)
        return Cfg(used_terms, keep, symbol, {s: self.rules[s] for s in keep})

    def to_text(self) -> str:
        lines = [f"# start: {self.start}"]
        for lhs in reversed(self.topological_order()):
            lines.append(f"{lhs} -> {' '.join(self.rules[lhs])}")
        return "\n".join(lines) + "\n"


def terminal_symbol(h: DirectedHypergraph, v: int) -> str:
    return h.compounds[v].code.decode("ascii")


def nonterminal_symbol(v: int) -> str:
    return f"N{v}"


def cfg_from_witness(w: Witness, h: DirectedHypergraph, target: int) -> Cfg:
    """Grammar with one rule per assembled compound of ``w``.

    Multi-head edges contribute one rule per head (each head keeps only its
    own rule); a compound produced by two selected edges is ambiguous.
    """
    report = validate_pathway(h, w, target)
    if not report.ok:
        raise HypergraphError(f"invalid witness: {report.reason}")
    producer: dict[int, int] = {}
    for eid in w.selected_edges:
        for z in h.edges[eid].head:
            if z in h.seeds:
                continue
            if z in producer:
                raise GrammarError(f"compound v{z} is produced by edges {producer[z]} and {eid}")
            producer[z] = eid

    def sym(v: int) -> str:
        return terminal_symbol(h, v) if v in h.seeds else nonterminal_symbol(v)

    def key(v: int) -> tuple:
        return (h.compounds[v].code, v)

    rules = {}
    for z, eid in producer.items():
        tail = sorted(h.edges[eid].tail, key=key)
        rules[nonterminal_symbol(z)] = tuple(sym(u) for u in tail)
    terminals = {terminal_symbol(h, v) for v in w.selected_vertices if v in h.seeds}
    return Cfg(terminals, set(rules), sym(target), rules)


def expand_string(g: Cfg, symbol: str | None = None) -> tuple[str, ...]:
    """The unique terminal string derived from ``symbol`` (default: start)."""
    symbol = g.start if symbol is None else symbol
    memo: dict[str, tuple[str, ...]] = {}
    for nt in g.topological_order():
        out: list[str] = []
        for s in g.rules[nt]:
            out.extend(memo[s] if s in g.nonterminals else (s,))
        memo[nt] = tuple(out)
    if symbol in g.nonterminals:
        return memo[symbol]
    if symbol in g.terminals:
        return (symbol,)
    raise GrammarError(f"unknown symbol {symbol!r}")


def is_contiguous(part: tuple[str, ...], whole: tuple[str, ...]) -> bool:
    n = len(part)
    return any(whole[i:i + n] == part for i in range(len(whole) - n + 1))


def collapse_unary(g: Cfg) -> Cfg:
    """Drop rules ``A -> B`` with ``B`` a nonterminal, redirecting ``A`` to ``B``."""
    target: dict[str, str] = {}

    def resolve(s: str) -> str:
        seen = []
        while s in g.nonterminals and len(g.rules[s]) == 1 and g.rules[s][0] in g.nonterminals:
            seen.append(s)
            s = g.rules[s][0]
        for t in seen:
            target[t] = s
        return s

    start = resolve(g.start)
    rules = {}
    for lhs, rhs in g.rules.items():
        if resolve(lhs) != lhs:
            continue
        rules[lhs] = tuple(resolve(s) for s in rhs)
    keep = set(g.restricted(start).nonterminals) if start in g.nonterminals else set()
    keep = {resolve(s) for s in keep}
    rules = {k: v for k, v in rules.items() if k in keep}
    return Cfg(set(g.terminals), set(rules), start, rules)


def wrapper_symbol(t: str) -> str:
    return f"T[{t}]"


def cnf_growth(g: Cfg) -> int:
    """Nonterminals added by CNF conversion: one wrapper per terminal plus intermediaries."""
    c = collapse_unary(g)
    return len(c.terminals) + sum(max(len(r) - 2, 0) for r in c.rules.values())


def to_cnf(g: Cfg) -> Cfg:
    """Chomsky normal form: ``A -> B C`` and ``T -> t`` rules only.

    Unary rules between nonterminals are collapsed first.  Every terminal gets
    a wrapper nonterminal; a right-hand side of length k > 2 is chained
    through k - 2 intermediaries.
    """
    c = collapse_unary(g)
    wrap = {t: wrapper_symbol(t) for t in sorted(c.terminals)}
    rules: dict[str, tuple[str, ...]] = {w: (t,) for t, w in wrap.items()}

    def lift(s: str) -> str:
        return wrap.get(s, s)

    for lhs in sorted(c.rules):
        rhs = c.rules[lhs]
        if len(rhs) == 1:
            # only a terminal can remain here; route it through its wrapper
            rules[lhs] = (lift(rhs[0]),) if rhs[0] in c.nonterminals else rhs
            continue
        rhs = tuple(lift(s) for s in rhs)
        cur = lhs
        for k in range(len(rhs) - 2):
            nxt = f"{lhs}.{k + 1}"
            rules[cur] = (rhs[k], nxt)
            cur = nxt
        rules[cur] = rhs[-2:]
    start = c.start
    if start in c.terminals:
        start = wrap[start]
    return Cfg(set(c.terminals), set(rules), start, rules)
