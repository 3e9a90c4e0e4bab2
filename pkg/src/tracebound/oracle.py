"""Exact class-respecting subgraph search: containment, copy enumeration, verification.

Candidate vertex sets are int bitmasks; a pattern vertex whose incident pattern
edge is otherwise fully mapped is restricted to the host's completion mask for
that edge, so every completed edge is present by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Union

from .errors import DomainError, ResourceLimitError
from .family import CopyRecord, canonical_labeling, rep_vertex
from .hypergraph import Hypergraph, PartitionedHypergraph, base_of, iter_bits, popcount

Host = Union[Hypergraph, PartitionedHypergraph]

__all__ = [
    "CopyRecord",
    "CopyCount",
    "Verdict",
    "find_embedding",
    "iter_embeddings",
    "count_copies",
    "copies_extending",
    "verify_embedding",
]


def _host_parts(g: Host):
    if isinstance(g, PartitionedHypergraph):
        return g.base, g.class_masks
    return g, None


def iter_embeddings(
    h: Host,
    g: Host,
    *,
    heuristic: bool = True,
    restrict: dict[int, int] | None = None,
) -> Iterator[dict[int, int]]:
    """Yield every injective map sending edges of h to edges of g.

    With a partitioned host the i-th class of h maps into the i-th class of g;
    a plain host accepts a plain pattern.
    ``restrict`` optionally narrows the candidate mask of individual h-vertices.
    """
    gb, masks = _host_parts(g)
    if gb.r != h.r:
        raise DomainError(f"uniformity mismatch: pattern {h.r}, host {gb.r}")
    if masks is not None:
        if not isinstance(h, PartitionedHypergraph):
            raise DomainError("a partitioned host needs a partitioned pattern")
        if len(masks) != len(h.classes):
            raise DomainError("class counts differ")
    table = gb.completions
    hverts = sorted(h.vertices)
    base = {}
    for y in hverts:
        base[y] = masks[h.class_of[y]] if masks is not None else gb.vertex_mask
        if restrict and y in restrict:
            base[y] &= restrict[y]
    inc = base_of(h).incidence
    assigned: dict[int, int] = {}

    def candidates(y: int, used: int) -> int:
        mask = base[y] & ~used
        for e in inc[y]:
            others = [u for u in e if u != y]
            if all(u in assigned for u in others):
                mask &= table.get(tuple(sorted(assigned[u] for u in others)), 0)
                if not mask:
                    return 0
        return mask

    def rec(used: int):
        if len(assigned) == len(hverts):
            yield dict(assigned)
            return
        if heuristic:
            best, best_mask, best_size = None, 0, None
            for y in hverts:
                if y in assigned:
                    continue
                m = candidates(y, used)
                size = popcount(m)
                if best is None or size < best_size:
                    best, best_mask, best_size = y, m, size
                    if size == 0:
                        break
            y, mask = best, best_mask
        else:
            y = next(u for u in hverts if u not in assigned)
            mask = candidates(y, used)
        for x in iter_bits(mask):
            assigned[y] = x
            yield from rec(used | (1 << x))
            del assigned[y]

    if not hverts:
        yield {}
        return
    yield from rec(0)


def find_embedding(h: Host, g: Host, *, heuristic: bool = True) -> dict[int, int] | None:
    """Some embedding of h into g, or None when g contains no copy of h."""
    return next(iter_embeddings(h, g, heuristic=heuristic), None)


class CopyCount(NamedTuple):
    count: int
    copies: list[CopyRecord]


def _image(mapping: dict[int, int], h: PartitionedHypergraph) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(mapping[v] for v in e)) for e in h.edges))


def _records(j: PartitionedHypergraph, maps: Iterator[dict[int, int]], max_copies: int) -> list[CopyRecord]:
    lab = canonical_labeling(j.without_isolated())
    to_rep = {v: rep_vertex(lab.class_sizes, c, x) for v, (c, x) in lab.labels.items()}
    seen: dict[tuple, CopyRecord] = {}
    for m in maps:
        img = _image(m, j)
        if img not in seen:
            seen[img] = CopyRecord(lab.code, img, {to_rep[v]: m[v] for v in to_rep})
            if len(seen) > max_copies:
                raise ResourceLimitError(f"more than {max_copies} copies")
    return [seen[k] for k in sorted(seen)]


def count_copies(
    j: PartitionedHypergraph,
    g: Host,
    *,
    max_pattern_edges: int = 12,
    max_host_vertices: int = 64,
    max_copies: int = 1_000_000,
    heuristic: bool = True,
) -> CopyCount:
    """All distinct images (unlabeled copies) of j in g."""
    if j.e == 0:
        raise DomainError("pattern must be nonempty")
    if j.e > max_pattern_edges:
        raise ResourceLimitError(f"pattern has {j.e} edges, guard is {max_pattern_edges}")
    host_v = g.v
    if host_v > max_host_vertices:
        raise ResourceLimitError(f"host has {host_v} vertices, guard is {max_host_vertices}")
    j = j.without_isolated()
    recs = _records(j, iter_embeddings(j, g, heuristic=heuristic), max_copies)
    return CopyCount(len(recs), recs)


def copies_extending(
    j: PartitionedHypergraph,
    g: PartitionedHypergraph,
    low_copy,
    *,
    max_copies: int = 1_000_000,
) -> list[CopyRecord]:
    """Copies J' of j in g whose trace on the first r-1 classes is exactly ``low_copy``."""
    if j.r != g.r or g.r < 2:
        raise DomainError("pattern and host must share uniformity >= 2")
    low = {tuple(sorted(s)) for s in low_copy}
    if not low:
        raise DomainError("the lower copy must be nonempty")
    gb = g.base
    low_classes = set(range(g.r - 1))
    for s in low:
        if len(s) != g.r - 1 or {g.class_of.get(v) for v in s} != low_classes:
            raise DomainError(f"{s} is not an edge of the lower trace")
        if s not in gb.completions:
            raise DomainError(f"{s} is not in the trace of the host")
    j = j.without_isolated()
    top = g.r - 1
    cand_edges = [s + (x,) for s in sorted(low) for x in iter_bits(gb.completions[s] & g.class_masks[top])]
    sub = PartitionedHypergraph.build(g.classes, cand_edges)
    top_verts = set(g.classes[top])

    def maps():
        for m in iter_embeddings(j, sub):
            tr = {tuple(sorted(x for x in (m[v] for v in e) if x not in top_verts)) for e in j.edges}
            if tr == low:
                yield m

    return _records(j, maps(), max_copies)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violation: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_embedding(mapping: dict[int, int], h: PartitionedHypergraph, g: Host) -> Verdict:
    """Independent check that ``mapping`` is an injective, class-respecting, edge-preserving map."""
    for y in sorted(h.vertices):
        if y not in mapping:
            return Verdict(False, f"vertex {y} is unmapped")
    seen: dict[int, int] = {}
    for y in sorted(h.vertices):
        x = mapping[y]
        if x in seen:
            return Verdict(False, f"vertices {seen[x]} and {y} both map to {x}")
        seen[x] = y
    if isinstance(g, PartitionedHypergraph):
        host_edges = {frozenset(e) for e in g.base.edges}
        for i, cls in enumerate(h.classes):
            for y in cls:
                x = mapping[y]
                if x not in g.classes[i]:
                    return Verdict(False, f"vertex {y} of class {i + 1} maps to {x} outside class {i + 1}")
    else:
        host_edges = {frozenset(e) for e in g.edges}
    for e in sorted(h.edges):
        img = frozenset(mapping[y] for y in e)
        if img not in host_edges:
            return Verdict(False, f"edge {e} maps to non-edge {tuple(sorted(img))}")
    return Verdict(True)
