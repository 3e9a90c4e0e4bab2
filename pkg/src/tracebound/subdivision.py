"""Canonical (chain) subdivision of a homogeneous simplicial complex."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

from .errors import DomainError
from .hypergraph import Hypergraph, PartitionedHypergraph, SimplicialComplex, is_trace_bounded, trace_i


@dataclass(frozen=True)
class SubdivisionResult:
    source: SimplicialComplex
    complex: SimplicialComplex
    partition: PartitionedHypergraph
    new_vertex_index: dict[tuple[int, ...], int]

    @property
    def k(self) -> int:
        return self.source.k


def canonical_subdivide(s: SimplicialComplex) -> SubdivisionResult:
    """Replace every facet by the (k+1)! simplices spanned by its maximal chains of faces.

    One new vertex v_T is created per face T with |T| >= 2, shared by all
    facets containing T. New ids follow max(V(s)) in order of (|T|, T).
    """
    if s.k < 1:
        raise DomainError("subdivision needs dimension k >= 1")
    if not s.facets:
        raise DomainError("complex has no facets")
    faces = {t for f in s.facets for size in range(2, s.k + 2) for t in combinations(f, size)}
    nxt = max(s.vertices) + 1
    index = {}
    for t in sorted(faces, key=lambda t: (len(t), t)):
        index[t] = nxt
        nxt += 1
    new_facets = set()
    for f in sorted(s.facets):
        for order in permutations(f):
            chain = [order[0]]
            chain += [index[tuple(sorted(order[:t]))] for t in range(2, len(f) + 1)]
            new_facets.add(tuple(sorted(chain)))
    classes = [sorted(s.vertices)]
    for t in range(2, s.k + 2):
        classes.append(sorted(v for face, v in index.items() if len(face) == t))
    cx = SimplicialComplex(s.k, frozenset(new_facets))
    part = PartitionedHypergraph(Hypergraph(s.k + 1, cx.facets, frozenset(v for c in classes for v in c)),
                                 tuple(map(tuple, classes)))
    return SubdivisionResult(s, cx, part, index)


def certify_subdivision(res: SubdivisionResult, d: int) -> bool:
    """Recheck the structural invariants of a subdivision and d-trace-boundedness."""
    k = res.source.k
    part = res.partition
    if len(res.complex.facets) != math.factorial(k + 1) * len(res.source.facets):
        return False
    if set(part.edges) != set(res.complex.facets) or part.r != k + 1:
        return False
    if set(part.classes[0]) != set(res.source.vertices):
        return False
    for t in range(2, k + 2):
        expected = {v for face, v in res.new_vertex_index.items() if len(face) == t}
        if set(part.classes[t - 1]) != expected:
            return False
    for t in range(2, k + 2):
        degs = trace_i(part, t).base.degrees
        if any(degs[v] != math.factorial(t) for v in part.classes[t - 1]):
            return False
    return bool(is_trace_bounded(part, d))


def homeomorph_target(s: SimplicialComplex) -> PartitionedHypergraph:
    """The (k+1)-partite view of the canonical subdivision; a copy of it is a homeomorph of s."""
    return canonical_subdivide(s).partition
