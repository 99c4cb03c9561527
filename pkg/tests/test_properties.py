"""Randomised checks (Hypothesis, at least 100 cases each) against slow oracles."""

import itertools
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from asmbly.dp import CostModel, bellman_residuals, dp_solve, unit_weight
from asmbly.hypergraph import (
    Witness,
    b_edge_origins,
    is_grounded,
    min_edge_comparison,
    minimal_vertices,
    reachable_from,
    restrict_below,
    to_b_hypergraph,
    validate_pathway,
)
from asmbly.ilp import build_ilp, solve
from asmbly.molgraph import LabeledGraph, canonical_form, is_isomorphic, relabel
from asmbly.rewrite import expand

from oracles import abstract_hypergraph, enumerate_plan_trees, realizable_by_permutation, retro_cost

CASES = settings(max_examples=120, deadline=None)


# ---------------------------------------------------------------------------
# strategies

@st.composite
def labeled_graphs(draw, max_vertices=12, connected=False):
    n = draw(st.integers(1, max_vertices))
    labels = tuple(draw(st.lists(st.sampled_from("CCCNO"), min_size=n, max_size=n)))
    pairs = list(itertools.combinations(range(n), 2))
    edges = []
    if connected:
        for v in range(1, n):
            u = draw(st.integers(0, v - 1))
            edges.append((u, v))
    extra = draw(st.lists(st.sampled_from(pairs), max_size=2 * n, unique=True)) if pairs else []
    edges = sorted(set(edges) | set(extra))
    bonds = draw(st.lists(st.sampled_from(["single", "single", "double", "aromatic"]),
                          min_size=len(edges), max_size=len(edges)))
    return LabeledGraph(labels, tuple((i, j, b) for (i, j), b in zip(edges, bonds)))


@st.composite
def small_molecules(draw):
    n = draw(st.integers(2, 6))
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in edges]
    room = 7 - len(edges)
    edges |= set(draw(st.lists(st.sampled_from(pairs), max_size=min(room, 2), unique=True))) if pairs else set()
    labels = tuple(draw(st.lists(st.sampled_from("CCN"), min_size=n, max_size=n)))
    return LabeledGraph(labels, tuple((i, j, "single") for i, j in sorted(edges)))


@st.composite
def hypergraphs(draw, max_edges=8, multi_head=True, max_vertices=7):
    """Acyclic: every tail vertex has a smaller index than every head vertex."""
    n = draw(st.integers(3, max_vertices))
    k = draw(st.integers(1, 2))
    m = draw(st.integers(1, max_edges))
    edges, weights = [], []
    for _ in range(m):
        lo = draw(st.integers(k, n - 1))
        head_size = draw(st.integers(1, 2)) if multi_head else 1
        head = draw(st.lists(st.integers(lo, n - 1), min_size=head_size, max_size=head_size))
        tail = draw(st.lists(st.integers(0, lo - 1), min_size=1, max_size=3))
        edges.append((tail, head))
        weights.append(draw(st.integers(0, 1)))
    return abstract_hypergraph(n, edges, range(k), weights)


# ---------------------------------------------------------------------------
# molgraph

@CASES
@given(labeled_graphs(), st.randoms(use_true_random=False))
def test_canonical_form_is_permutation_invariant(g, rnd):
    perm = list(range(g.n_vertices))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    assert canonical_form(h) == canonical_form(g)
    assert is_isomorphic(g, h)


@CASES
@given(labeled_graphs(max_vertices=6), labeled_graphs(max_vertices=6))
def test_canonical_equality_means_isomorphism(a, b):
    from oracles import brute_isomorphic
    assert (canonical_form(a) == canonical_form(b)) == brute_isomorphic(a, b)


# ---------------------------------------------------------------------------
# hypergraph

@CASES
@given(hypergraphs(), st.data())
def test_to_b_preserves_reachability(h, data):
    sources = set(data.draw(st.lists(st.sampled_from(list(h.vertices)), max_size=3)))
    hb = to_b_hypergraph(h)
    assert reachable_from(h, sources) == reachable_from(hb, sources)


@CASES
@given(hypergraphs(), st.data())
def test_reachability_is_monotone(h, data):
    small = set(data.draw(st.lists(st.sampled_from(list(h.vertices)), max_size=2)))
    big = small | set(data.draw(st.lists(st.sampled_from(list(h.vertices)), max_size=2)))
    assert reachable_from(h, small) <= reachable_from(h, big)


def oracle_valid(h, edges, target):
    verts = {target}
    for e in edges:
        verts.update(h.edges[e].tail)
        verts.update(h.edges[e].head)
    if any(target in h.edges[e].tail for e in edges):
        return False
    produced = set(h.seeds & verts)
    for e in edges:
        produced.update(h.edges[e].head)
    if produced != verts:
        return False
    return realizable_by_permutation(h, edges, h.seeds & verts)


@CASES
@given(hypergraphs(max_edges=8), st.data())
def test_validate_pathway_matches_exhaustive_orders(h, data):
    edges = data.draw(st.lists(st.sampled_from(range(len(h.edges))), max_size=8, unique=True))
    target = data.draw(st.sampled_from(list(h.vertices)))
    w = Witness.from_edges(h, edges, target)
    report = validate_pathway(h, w, target)
    assert report.ok == oracle_valid(h, edges, target)
    if report.ok:
        assert sorted(report.order) == sorted(edges)


@CASES
@given(hypergraphs(max_edges=7), st.data())
def test_min_edge_comparison_inequality(h, data):
    reach = sorted(reachable_from(h, h.seeds) - h.seeds)
    assume(reach)
    target = data.draw(st.sampled_from(reach))
    general, b = min_edge_comparison(h, target)
    assert general <= b


@CASES
@given(hypergraphs(max_edges=7), st.data())
def test_witnesses_transfer_between_h_and_its_b_form(h, data):
    hb = to_b_hypergraph(h)
    origin = b_edge_origins(h)
    x = data.draw(st.sampled_from(list(h.vertices)))
    # an edge set of h that reaches x: its derived B-edges reach x too
    picked = set(data.draw(st.lists(st.sampled_from(range(len(h.edges))), unique=True)))
    derived = [k for k, o in enumerate(origin) if o in picked]
    assert (x in reachable_from(h, h.seeds, picked)) == (x in reachable_from(hb, hb.seeds, derived))
    # an edge set of h^B that reaches x: the edges it came from reach x in h
    picked_b = data.draw(st.lists(st.sampled_from(range(len(hb.edges))), unique=True))
    if x in reachable_from(hb, hb.seeds, picked_b):
        assert x in reachable_from(h, h.seeds, {origin[k] for k in picked_b})


@CASES
@given(hypergraphs(max_edges=8))
def test_restriction_stays_rooted(h):
    x = max(h.vertices)
    r = restrict_below(h, x)
    if is_grounded(h, h.seeds):
        assert is_grounded(r, r.seeds)
    codes = {h.compounds[v].code for v in minimal_vertices(h)}
    assert {r.compounds[v].code for v in minimal_vertices(r)} <= codes | {h.compounds[x].code}


# ---------------------------------------------------------------------------
# solver and cost measures

@CASES
@given(small_molecules(), st.sampled_from(["split", "edge"]))
def test_index_never_exceeds_additive_cost(g, rule):
    exp = expand(g, rule)
    h = exp.hypergraph
    ass = solve(build_ilp(h, exp.target)).affixation_count
    table = dp_solve(h, CostModel.additive(1, 0))
    assert ass <= table.value[exp.target]


@CASES
@given(hypergraphs(max_edges=10, multi_head=False), st.sampled_from([Fraction(5, 4), Fraction(2), Fraction(3)]),
       st.booleans())
def test_dp_satisfies_bellman_exactly(h, r, additive):
    cm = CostModel.additive(1, 0) if additive else CostModel.retro_yield(r)
    table = dp_solve(h, cm)
    assert bellman_residuals(table) == []


@CASES
@given(hypergraphs(max_edges=12, multi_head=False), st.sampled_from([Fraction(5, 4), Fraction(2)]),
       st.booleans())
def test_plan_count_matches_enumeration(h, r, unit):
    weight = unit_weight if unit else (lambda g: Fraction(g.n_vertices))
    cm = CostModel.retro_yield(r, weight)
    table = dp_solve(h, cm)
    x = max(h.vertices)
    assume(table.finite(x))
    costs = enumerate_plan_trees(h, x, retro_cost(r, lambda v: weight(h.graph(v))))
    best = min(costs)
    assert table.value[x] == best
    assert table.plan_count[x] == costs.count(best)
