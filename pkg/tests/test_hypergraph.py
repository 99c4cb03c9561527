import json

import pytest

from asmbly.hypergraph import (
    DirectedHypergraph,
    HypergraphError,
    UnreachableTargetError,
    Witness,
    ancestors,
    is_acyclic,
    is_grounded,
    min_edge_comparison,
    reachable_from,
    realizability_order,
    restrict_below,
    to_b_hypergraph,
    topological_vertices,
    validate_pathway,
    witness_depth,
    witness_to_dot,
)
from asmbly.ilp import build_ilp, solve

from oracles import abstract_hypergraph, realizable_by_permutation


def chain_with_dead_end():
    # s -> a -> x and a -> d
    return abstract_hypergraph(4, [([0], [1]), ([1], [2]), ([1], [3])], seeds=[0])


def test_reachability_basics():
    h = chain_with_dead_end()
    assert reachable_from(h, h.vertices) == set(h.vertices)
    assert reachable_from(h, {0}, edges=[]) == {0}
    assert reachable_from(h, {0}) == {0, 1, 2, 3}


def test_reachability_needs_whole_tail():
    h = abstract_hypergraph(4, [([0, 1], [2]), ([0], [3])], seeds=[0])
    assert reachable_from(h, {0}) == {0, 3}
    assert reachable_from(h, {0, 1}) == {0, 1, 2, 3}


def test_cubane_expansion_reaches_cubane(cubane_split):
    h = cubane_split.hypergraph
    assert cubane_split.target in reachable_from(h, h.seeds)
    assert is_grounded(h, h.seeds)


def test_groundedness():
    h = chain_with_dead_end()
    assert is_grounded(h, {0})
    h.add_vertex(code=b"O|")
    assert not is_grounded(h, {0})


def test_witness_restriction_is_grounded(cubane_split):
    h = cubane_split.hypergraph
    w = solve(build_ilp(h, cubane_split.target))
    sub, vmap, _ = h.subhypergraph(w.selected_vertices, w.selected_edges)
    assert is_grounded(sub, sub.seeds)


def test_to_b_identity_on_b_hypergraphs():
    h = chain_with_dead_end()
    hb = to_b_hypergraph(h)
    assert hb.edges == h.edges and hb.seeds == h.seeds


def test_to_b_splits_heads():
    h = abstract_hypergraph(3, [([0], [1, 2])], seeds=[0])
    hb = to_b_hypergraph(h)
    assert sorted((e.tail, e.head) for e in hb.edges) == [((0,), (1,)), ((0,), (2,))]


def test_to_b_keeps_head_multiplicity():
    h = abstract_hypergraph(2, [([0], [1, 1])], seeds=[0])
    hb = to_b_hypergraph(h)
    assert [(e.tail, e.head) for e in hb.edges] == [((0,), (1,)), ((0,), (1,))]


def test_restrict_below_seed():
    h = chain_with_dead_end()
    r = restrict_below(h, 0)
    assert len(r.compounds) == 1 and not r.edges


def test_restrict_below_drops_dead_end():
    h = chain_with_dead_end()
    r = restrict_below(h, 2)
    assert len(r.edges) == 2
    assert h.compounds[3].code not in {c.code for c in r.compounds}
    assert ancestors(h, 2) == {0, 1, 2}


def test_restrict_below_cubane_is_everything(cubane_split):
    h = cubane_split.hypergraph
    r = restrict_below(h, cubane_split.target)
    assert (len(r.compounds), len(r.edges)) == (len(h.compounds), len(h.edges))


def test_validate_solver_witness(cubane_split):
    h = cubane_split.hypergraph
    w = solve(build_ilp(h, cubane_split.target))
    report = validate_pathway(h, w, cubane_split.target)
    assert report.ok
    assert sorted(report.order) == sorted(w.selected_edges)


def test_validate_rejects_unavailable_tail():
    h = abstract_hypergraph(4, [([0], [1]), ([1, 3], [2])], seeds=[0])
    w = Witness((0, 1), (0, 1, 2, 3))
    report = validate_pathway(h, w, 2)
    assert not report.ok


def test_validate_reports_stuck_edges():
    # grounded through 0 but the selected producer of 1 needs 2, which needs 1
    h = abstract_hypergraph(3, [([0], [1]), ([1], [2]), ([2], [1])], seeds=[0])
    order, stuck = realizability_order(h, [1, 2], {0})
    assert order == () and set(stuck) == {1, 2}


def test_validate_empty_witness_on_seed():
    h = chain_with_dead_end()
    report = validate_pathway(h, Witness((), (0,)), 0)
    assert report.ok and report.order == ()


def test_validate_rejects_consumed_target():
    h = chain_with_dead_end()
    w = Witness.from_edges(h, [0, 1], 1)
    assert not validate_pathway(h, w, 1).ok


def test_acyclicity():
    assert is_acyclic(abstract_hypergraph(2, [], seeds=[0]))
    assert not is_acyclic(abstract_hypergraph(2, [([0], [1]), ([1], [0])], seeds=[0]))
    with pytest.raises(HypergraphError):
        topological_vertices(abstract_hypergraph(2, [([0], [1]), ([1], [0])], seeds=[0]))


def test_expansions_are_acyclic(cubane_split, cubane_edge):
    assert is_acyclic(cubane_split.hypergraph)
    assert is_acyclic(cubane_edge.hypergraph)


def two_head_instance():
    # s splits into a and b at once; x needs both
    return abstract_hypergraph(5, [([0], [1, 2]), ([1, 2], [3]), ([0], [4])], seeds=[0])


def test_min_edge_comparison_strict():
    h = two_head_instance()
    general, b = min_edge_comparison(h, 3)
    assert (general, b) == (2, 3)


def test_min_edge_comparison_b_hypergraph():
    h = chain_with_dead_end()
    assert min_edge_comparison(h, 2) == (2, 2)


def test_min_edge_comparison_cubane(cubane_edge):
    h = cubane_edge.hypergraph
    a, b = min_edge_comparison(h, cubane_edge.target)
    assert a == b


def test_min_edge_comparison_unreachable():
    h = abstract_hypergraph(2, [], seeds=[0])
    with pytest.raises(UnreachableTargetError):
        min_edge_comparison(h, 1)


def test_json_round_trip(cubane_edge):
    h = cubane_edge.hypergraph
    back = DirectedHypergraph.from_json(h.to_json())
    assert back.edges == h.edges and back.seeds == h.seeds
    assert [c.code for c in back.compounds] == [c.code for c in h.compounds]
    data = json.loads(h.to_json())
    assert set(data["edges"][0]) == {"tail", "head", "w", "rule"}
    assert set(data["vertices"][0]) == {"id", "code", "graph"}


def test_dot_export(cubane_edge):
    h = cubane_edge.hypergraph
    w = solve(build_ilp(h, cubane_edge.target))
    dot = witness_to_dot(h, w, cubane_edge.target)
    assert dot.startswith("digraph witness {")
    assert dot.count("shape=square") == len(w.selected_edges)


def test_depth():
    h = chain_with_dead_end()
    assert witness_depth(h, Witness((), (0,))) == 0
    assert witness_depth(h, Witness.from_edges(h, [0, 1], 2)) == 2


def test_permutation_oracle_agrees_on_fixture():
    h = two_head_instance()
    assert realizable_by_permutation(h, [0, 1], {0})
    assert not realizable_by_permutation(h, [1], {0})
