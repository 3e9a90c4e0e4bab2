import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strategies import partite_graphs, uniform_graphs
from tracebound.errors import DomainError
from tracebound.hypergraph import (
    Hypergraph,
    PartitionedHypergraph,
    common_neighbourhood,
    degree,
    extract_partite,
    is_trace_bounded,
    link,
    random_partite,
    trace,
    trace_i,
)
from tracebound.io import dumps_json, dumps_text, loads_json, loads_text

G = Hypergraph(3, frozenset({(1, 2, 3), (1, 4, 5)}))
K222 = PartitionedHypergraph.build([[1, 2], [3, 4], [5, 6]],
                                   [(a, b, c) for a in (1, 2) for b in (3, 4) for c in (5, 6)])
C4 = PartitionedHypergraph.build([[0, 1], [2, 3]], [(0, 2), (0, 3), (1, 2), (1, 3)])


def test_link_unfolds_definition():
    assert link(G, 1).edges == {(2, 3), (4, 5)}


def test_link_of_missing_vertex():
    with pytest.raises(DomainError):
        link(Hypergraph(3, frozenset({(1, 2, 3)})), 4)


def test_degree_examples():
    assert degree(G, 1) == 2
    assert degree(Hypergraph(3, frozenset({(1, 2, 3)}), frozenset({1, 2, 3, 9})), 9) == 0


def test_bad_edges_rejected():
    with pytest.raises(DomainError):
        Hypergraph(3, frozenset({(1, 1, 2)}))
    with pytest.raises(DomainError):
        PartitionedHypergraph.build([[0, 1], [2]], [(0, 1)])


@given(uniform_graphs(r_max=3))
def test_link_size_is_degree_and_handshake(g):
    if g.r >= 2:
        assert all(link(g, v).e == degree(g, v) for v in g.vertices)
    assert sum(degree(g, v) for v in g.vertices) == g.r * g.e


def test_common_neighbourhood_complete():
    assert common_neighbourhood(K222, [(1, 3)]) == {5, 6}
    assert common_neighbourhood(K222, [(1, 3), (2, 4)]) == {5, 6}
    sparse = PartitionedHypergraph.build(K222.classes, [(1, 3, 5)])
    assert common_neighbourhood(sparse, [(2, 4)]) == frozenset()


def test_common_neighbourhood_matches_brute_force_on_all_vertices():
    edges = {frozenset(e) for e in K222.edges}
    j = [(1, 3), (2, 4)]
    brute = {x for x in K222.vertices if all(frozenset(s) | {x} in edges for s in j if x not in s)
             and all(x not in s for s in j)}
    assert common_neighbourhood(K222, j) == brute


def test_trace_examples():
    assert trace(Hypergraph(3, frozenset({(1, 2, 3)})), {1, 2}) == {(1, 2)}
    assert trace(Hypergraph(3, frozenset({(1, 2, 3), (1, 2, 4)})), {1, 2}) == {(1, 2)}


@given(partite_graphs(r_min=2, r_max=3), st.data())
def test_trace_agrees_with_trace_i(g, data):
    i = data.draw(st.integers(1, g.r))
    keep = set().union(*g.classes[:i])
    assert set(trace_i(g, i).edges) == set(trace(g, keep))


def test_trace_i_extremes():
    assert trace_i(K222, 3) is K222
    g = PartitionedHypergraph.build([[0, 1, 2], [3]], [(0, 3), (1, 3)])
    assert set(trace_i(g, 1).edges) == {(0,), (1,)}


def test_trace_bounded_c4():
    assert is_trace_bounded(C4, 2)
    check = is_trace_bounded(C4, 1)
    assert not check and check.degree == 2 and check.level == 2


def test_extract_partite_keeps_partite_input():
    assert extract_partite(K222) is K222


@pytest.mark.parametrize("seed", range(10))
def test_extract_partite_complete_3graph(seed):
    from itertools import combinations

    k6 = Hypergraph(3, frozenset(combinations(range(6), 3)))
    g = extract_partite(k6, n=2, seed=seed)
    assert g.e >= 5 and all(len(c) == 2 for c in g.classes)
    assert set(g.edges) <= set(k6.edges)


def test_extract_partite_empty():
    g = extract_partite(Hypergraph(2, frozenset(), frozenset(range(4))), n=2)
    assert g.e == 0


@settings(max_examples=40, deadline=None)
@given(uniform_graphs(r_max=3, n_max=8), st.integers(0, 2**16))
def test_extract_partite_meets_averaging_bound(g, seed):
    g2 = extract_partite(g, seed=seed)
    assert g2.e * g.r**g.r >= math.factorial(g.r) * g.e
    assert set(g2.edges) <= set(g.edges)
    assert len({len(c) for c in g2.classes}) == 1


@given(partite_graphs())
def test_text_round_trip_partite(g):
    text = dumps_text(g)
    assert loads_text(text) == g
    assert dumps_text(loads_text(text)) == text
    assert loads_json(dumps_json(g)) == g


@given(uniform_graphs())
def test_round_trip_plain(g):
    assert loads_text(dumps_text(g)) == g
    assert loads_json(dumps_json(g)) == g


def test_text_header_mismatch():
    with pytest.raises(DomainError):
        loads_text("2 3 2\n0 1\n")


def test_random_partite_density_extremes():
    rng = np.random.default_rng(0)
    assert random_partite([3, 3], 1.0, rng).e == 9
    assert random_partite([3, 3], 0.0, rng).e == 0
