from itertools import combinations, permutations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import relabel_within_classes
from strategies import partite_graphs
from tracebound.errors import DomainError, ResourceLimitError
from tracebound.family import (
    canonical_form,
    decode,
    enumerate_family,
    iso_class,
    representative,
    subgraphs_up_to_d,
)
from tracebound.hypergraph import PartitionedHypergraph

C4 = PartitionedHypergraph.build([[0, 1], [2, 3]], [(0, 2), (0, 3), (1, 2), (1, 3)])


def _brute_count(sizes, d):
    """Classes of edge sets with <= d edges on labeled classes of the given sizes."""
    classes, nxt = [], 0
    for s in sizes:
        classes.append(tuple(range(nxt, nxt + s)))
        nxt += s
    cells = list(product(*classes))
    reps: list[frozenset] = []
    perms = list(product(*(permutations(c) for c in classes)))
    for t in range(1, d + 1):
        for sub in combinations(cells, t):
            g = frozenset(sub)
            images = set()
            for p in perms:
                m = {v: w for c, pc in zip(classes, p) for v, w in zip(c, pc)}
                images.add(frozenset(tuple(m[v] for v in e) for e in g))
            if not images.intersection(reps):
                reps.append(g)
    return len(reps)


def test_single_edges_share_a_code():
    a = PartitionedHypergraph.build([[5], [9]], [(5, 9)])
    b = PartitionedHypergraph.build([[0], [1]], [(0, 1)])
    assert canonical_form(a) == canonical_form(b)


def test_ordered_classes_distinguish_stars():
    share_first = PartitionedHypergraph.build([[0], [1, 2]], [(0, 1), (0, 2)])
    share_second = PartitionedHypergraph.build([[0, 1], [2]], [(0, 2), (1, 2)])
    assert canonical_form(share_first) != canonical_form(share_second)
    swapped = PartitionedHypergraph.build([[1, 2], [0]], [(0, 1), (0, 2)])
    assert canonical_form(swapped) != canonical_form(share_first)


def test_isolated_vertices_rejected():
    g = PartitionedHypergraph.build([[0, 3], [1]], [(0, 1)])
    with pytest.raises(DomainError):
        canonical_form(g)


@pytest.mark.parametrize("d", range(1, 9))
def test_h1d_has_one_class_per_size(d):
    fam = enumerate_family(1, d)
    assert sorted(c.e for c in fam) == list(range(1, d + 1))


@pytest.mark.parametrize("r,d,expected", [(2, 1, 1), (2, 2, 4), (2, 3, 10), (3, 2, 8)])
def test_small_family_counts_against_brute_force(r, d, expected):
    assert len(enumerate_family(r, d)) == expected
    assert _brute_count([d] * r, d) == expected


def test_h22_members():
    got = {tuple(sorted(decode(c.code)[1])) for c in enumerate_family(2, 2)}
    assert got == {((0, 0),), ((0, 0), (1, 1)), ((0, 0), (0, 1)), ((0, 0), (1, 0))}


def test_family_guard():
    with pytest.raises(ResourceLimitError):
        enumerate_family(5, 5)


@pytest.mark.parametrize("r,d", [(2, 3), (3, 2), (3, 3), (2, 4)])
def test_family_vertex_and_edge_ranges(r, d):
    for c in enumerate_family(r, d):
        assert r <= c.v <= r * d and 1 <= c.e <= d
        assert representative(c.code).base.span == representative(c.code).vertices
        assert canonical_form(c.representative) == c.code


def test_subgraphs_of_single_edge():
    e = PartitionedHypergraph.build([[0], [1]], [(0, 1)])
    groups = subgraphs_up_to_d(e, 2)
    assert len(groups) == 1 and groups[0][1][0].image == ((0, 1),)


def test_subgraphs_of_c4():
    sizes = sorted((cls.e, len(recs)) for cls, recs in subgraphs_up_to_d(C4, 2))
    assert sizes == [(1, 4), (2, 2), (2, 2), (2, 2)]


def test_subgraphs_zero_d():
    with pytest.raises(DomainError):
        subgraphs_up_to_d(C4, 0)


def test_witness_maps_land_on_images():
    for cls, recs in subgraphs_up_to_d(C4, 2):
        rep = cls.representative
        for rec in recs:
            mapped = {tuple(sorted(rec.witness_map[v] for v in e)) for e in rep.edges}
            assert mapped == set(rec.image)


@settings(max_examples=60, deadline=None)
@given(partite_graphs(min_edges=1), st.integers(0, 10**6))
def test_code_invariant_under_relabeling(g, seed):
    g = g.without_isolated()
    g2, _ = relabel_within_classes(g, np.random.default_rng(seed))
    assert canonical_form(g) == canonical_form(g2)
    assert iso_class(canonical_form(g)).e == g.e
