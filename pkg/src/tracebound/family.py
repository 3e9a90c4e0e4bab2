"""Isomorphism classes of small r-partite r-graphs with ordered classes.

Two partitioned graphs are isomorphic here when some bijection maps class i to
class i for every i and edges to edges. Canonical codes are built per connected
component: colour refinement splits each class into invariant cells, the
component's sorted edge list is minimised over all relabelings inside cells, and
the component codes are concatenated in sorted order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import DomainError, ResourceLimitError
from .hypergraph import PartitionedHypergraph

MAX_CELL_PRODUCT = 2_000_000


@dataclass(frozen=True)
class CanonicalLabeling:
    code: bytes
    labels: dict  # vertex -> (class index, label within class)
    class_sizes: tuple[int, ...]


@dataclass(frozen=True)
class IsoClass:
    code: bytes
    representative: PartitionedHypergraph
    v: int
    e: int


@dataclass(frozen=True)
class CopyRecord:
    """One unlabeled copy: its image edges plus a representative-to-host vertex map."""

    class_code: bytes
    image: tuple[tuple[int, ...], ...]
    witness_map: dict = field(compare=False, hash=False)


def _components(edges: Sequence[tuple]) -> list[list[tuple]]:
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        for v in e:
            parent.setdefault(v, v)
        for v in e[1:]:
            a, b = find(e[0]), find(v)
            if a != b:
                parent[a] = b
    groups: dict = {}
    for e in edges:
        groups.setdefault(find(e[0]), []).append(e)
    return list(groups.values())


def _refine(edges: Sequence[tuple], class_of: Mapping) -> dict:
    verts = {v for e in edges for v in e}
    color = {v: class_of[v] for v in verts}
    inc: dict = {v: [] for v in verts}
    for e in edges:
        for v in e:
            inc[v].append(e)
    ncolors = len(set(color.values()))
    while True:
        sig = {v: (color[v], tuple(sorted(tuple(color[u] for u in e) for e in inc[v]))) for v in verts}
        ranks = {s: k for k, s in enumerate(sorted(set(sig.values())))}
        color = {v: ranks[sig[v]] for v in verts}
        if len(ranks) == ncolors:
            return color
        ncolors = len(ranks)


def _canonical_component(edges: Sequence[tuple], class_of: Mapping, r: int):
    color = _refine(edges, class_of)
    cells: list[list[list]] = [[] for _ in range(r)]
    for c in range(r):
        members = sorted((v for v in color if class_of[v] == c), key=lambda v: color[v])
        by_color: dict = {}
        for v in members:
            by_color.setdefault(color[v], []).append(v)
        cells[c] = [by_color[k] for k in sorted(by_color)]
    flat = [cell for c in range(r) for cell in cells[c]]
    work = math.prod(math.factorial(len(cell)) for cell in flat)
    if work > MAX_CELL_PRODUCT:
        raise ResourceLimitError(f"canonical labeling would scan {work} relabelings")
    starts = []
    for c in range(r):
        pos = 0
        for cell in cells[c]:
            starts.append(pos)
            pos += len(cell)
    best, best_labels = None, None
    for perms in product(*(permutations(cell) for cell in flat)):
        lab = {}
        for start, perm in zip(starts, perms):
            for off, v in enumerate(perm):
                lab[v] = start + off
        code = tuple(sorted(tuple(lab[v] for v in e) for e in edges))
        if best is None or code < best:
            best, best_labels = code, lab
    sizes = tuple(sum(len(cell) for cell in cells[c]) for c in range(r))
    return best, best_labels, sizes


def encode(r: int, edges: Iterable[tuple[int, ...]]) -> bytes:
    body = ";".join(",".join(map(str, e)) for e in edges)
    return f"{r}|{body}".encode()


def decode(code: bytes) -> tuple[int, list[tuple[int, ...]]]:
    head, body = code.decode().split("|", 1)
    return int(head), [tuple(int(t) for t in chunk.split(",")) for chunk in body.split(";")]


def canonical_labeling_of(edges: Iterable[Sequence[Hashable]], class_of: Mapping, r: int) -> CanonicalLabeling:
    """Canonical labeling of an edge family whose vertices carry class indices 0..r-1."""
    ordered = [tuple(sorted(e, key=lambda v: class_of[v])) for e in edges]
    ordered = sorted(set(ordered), key=repr)
    if not ordered:
        raise DomainError("cannot canonicalize an empty edge set")
    comps = [_canonical_component(comp, class_of, r) for comp in _components(ordered)]
    comps.sort(key=lambda t: (len(t[0]), t[0], t[2]))
    offsets = [0] * r
    labels: dict = {}
    all_edges = []
    for code, lab, sizes in comps:
        all_edges += [tuple(x + offsets[c] for c, x in enumerate(e)) for e in code]
        for v, x in lab.items():
            c = class_of[v]
            labels[v] = (c, x + offsets[c])
        offsets = [o + s for o, s in zip(offsets, sizes)]
    all_edges.sort()
    return CanonicalLabeling(encode(r, all_edges), labels, tuple(offsets))


def canonical_labeling(j: PartitionedHypergraph) -> CanonicalLabeling:
    if j.base.span != j.vertices:
        raise DomainError("canonical form needs a graph without isolated vertices")
    return canonical_labeling_of(j.ordered_edges, j.class_of, j.r)


def canonical_form(j: PartitionedHypergraph) -> bytes:
    return canonical_labeling(j).code


def rep_vertex(class_sizes: Sequence[int], c: int, label: int) -> int:
    """Vertex id used in representatives for label ``label`` of class ``c``."""
    return sum(class_sizes[:c]) + label


@lru_cache(maxsize=None)
def representative(code: bytes) -> PartitionedHypergraph:
    r, edges = decode(code)
    sizes = [0] * r
    for e in edges:
        for c, x in enumerate(e):
            sizes[c] = max(sizes[c], x + 1)
    classes = [[rep_vertex(sizes, c, x) for x in range(sizes[c])] for c in range(r)]
    return PartitionedHypergraph.build(classes, [tuple(rep_vertex(sizes, c, x) for c, x in enumerate(e)) for e in edges])


def iso_class(code: bytes) -> IsoClass:
    rep = representative(code)
    return IsoClass(code, rep, rep.v, rep.e)


def class_vertex_count(code: bytes) -> int:
    return representative(code).v


@lru_cache(maxsize=None)
def _family_codes(r: int, d: int) -> tuple[bytes, ...]:
    single = tuple((c, 0) for c in range(r))
    cls = {v: v[0] for v in single}
    level = {canonical_labeling_of([single], cls, r).code}
    found = set(level)
    for _ in range(2, d + 1):
        nxt = set()
        for code in level:
            _, edges = decode(code)
            sizes = [max(e[c] for e in edges) + 1 for c in range(r)]
            existing = {tuple((c, x) for c, x in enumerate(e)) for e in edges}
            for choice in product(*(range(s + 1) for s in sizes)):
                new = tuple((c, x) for c, x in enumerate(choice))
                if new in existing:
                    continue
                es = list(existing) + [new]
                cls = {v: v[0] for e in es for v in e}
                nxt.add(canonical_labeling_of(es, cls, r).code)
        nxt -= found
        found |= nxt
        level = nxt
    return tuple(found)


def enumerate_family(r: int, d: int, max_rd: int = 12) -> list[IsoClass]:
    """All nonempty r-partite r-graphs with at most d edges, one per class, sorted by (e, v, code)."""
    if r < 1 or d < 1:
        raise DomainError("need r >= 1 and d >= 1")
    if r * d > max_rd:
        raise ResourceLimitError(f"family enumeration guard: r*d = {r * d} exceeds {max_rd}")
    classes = [iso_class(c) for c in _family_codes(r, d)]
    return sorted(classes, key=lambda k: (k.e, k.v, k.code))


def _subset_count(m: int, d: int) -> int:
    return sum(math.comb(m, t) for t in range(1, min(d, m) + 1))


def subgraphs_up_to_d(
    h: PartitionedHypergraph, d: int, limit: int = 1_000_000
) -> list[tuple[IsoClass, list[CopyRecord]]]:
    """Every nonempty edge subset of h with at most d edges, grouped by isomorphism class."""
    if d < 1:
        raise DomainError("d must be positive (copies are nonempty)")
    total = _subset_count(h.e, d)
    if total > limit:
        raise ResourceLimitError(f"{total} edge subsets exceed the limit {limit}")
    groups: dict[bytes, list[CopyRecord]] = {}
    edges = h.base.sorted_edges
    co = h.class_of
    for t in range(1, min(d, h.e) + 1):
        for sub in combinations(edges, t):
            lab = canonical_labeling_of(sub, co, h.r)
            wmap = {rep_vertex(lab.class_sizes, c, x): v for v, (c, x) in lab.labels.items()}
            groups.setdefault(lab.code, []).append(CopyRecord(lab.code, tuple(sub), wmap))
    out = [(iso_class(code), recs) for code, recs in groups.items()]
    out.sort(key=lambda p: (p[0].e, p[0].v, p[0].code))
    return out
