"""Uniform hypergraphs, r-partite hypergraphs and their basic operators.

Vertices are non-negative integers so that vertex sets can be carried around
as Python ``int`` bitmasks. Edges are stored as sorted tuples.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DomainError

Edge = tuple[int, ...]


def iter_bits(mask: int):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _normalize(edges: Iterable[Iterable[int]], r: int) -> frozenset[Edge]:
    out = set()
    for e in edges:
        t = tuple(sorted(int(v) for v in e))
        if len(t) != r or len(set(t)) != r:
            raise DomainError(f"edge {t!r} does not have exactly {r} distinct vertices")
        if t[0] < 0:
            raise DomainError(f"negative vertex id in edge {t!r}")
        out.add(t)
    return frozenset(out)


@dataclass(frozen=True)
class Hypergraph:
    """An r-uniform hypergraph.

    When ``vertices`` is omitted the vertex set is the span of the edges.
    """

    r: int
    edges: frozenset[Edge]
    vertices: frozenset[int] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.r < 1:
            raise DomainError("uniformity must be positive")
        edges = _normalize(self.edges, self.r)
        object.__setattr__(self, "edges", edges)
        span = frozenset(v for e in edges for v in e)
        if self.vertices is None:
            verts = span
        else:
            verts = frozenset(int(v) for v in self.vertices)
            if not span <= verts:
                raise DomainError("edges use vertices outside the vertex set")
            if any(v < 0 for v in verts):
                raise DomainError("vertex ids must be non-negative")
        object.__setattr__(self, "vertices", verts)

    @property
    def v(self) -> int:
        return len(self.vertices)

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def span(self) -> frozenset[int]:
        return frozenset(v for e in self.edges for v in e)

    @cached_property
    def vertex_mask(self) -> int:
        return to_mask(self.vertices)

    @cached_property
    def completions(self) -> dict[Edge, int]:
        """Map each (r-1)-set S to the bitmask of vertices v with S + v an edge."""
        table: dict[Edge, int] = defaultdict(int)
        for e in self.edges:
            for k, v in enumerate(e):
                table[e[:k] + e[k + 1:]] |= 1 << v
        return dict(table)

    @cached_property
    def degrees(self) -> dict[int, int]:
        deg = dict.fromkeys(self.vertices, 0)
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    @cached_property
    def incidence(self) -> dict[int, tuple[Edge, ...]]:
        inc: dict[int, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.sorted_edges:
            for v in e:
                inc[v].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    def __repr__(self) -> str:
        return f"Hypergraph(r={self.r}, v={self.v}, e={self.e})"


@dataclass(frozen=True)
class PartitionedHypergraph:
    """An r-partite r-graph with ordered classes; ``classes[0]`` is the first class."""

    base: Hypergraph
    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        classes = tuple(tuple(sorted(int(v) for v in c)) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        if len(classes) != self.base.r:
            raise DomainError(f"expected {self.base.r} classes, got {len(classes)}")
        seen: set[int] = set()
        for c in classes:
            if seen.intersection(c) or len(set(c)) != len(c):
                raise DomainError("partition classes overlap")
            seen.update(c)
        if seen != set(self.base.vertices):
            raise DomainError("partition classes must cover exactly the vertex set")
        class_of = self.class_of
        for e in self.base.edges:
            if sorted(class_of[v] for v in e) != list(range(self.base.r)):
                raise DomainError(f"edge {e} does not meet every class exactly once")

    @classmethod
    def build(cls, classes: Sequence[Iterable[int]], edges: Iterable[Iterable[int]]) -> "PartitionedHypergraph":
        classes = [tuple(c) for c in classes]
        verts = frozenset(v for c in classes for v in c)
        return cls(Hypergraph(len(classes), frozenset(tuple(e) for e in edges), verts), tuple(classes))

    @property
    def r(self) -> int:
        return self.base.r

    @property
    def edges(self) -> frozenset[Edge]:
        return self.base.edges

    @property
    def vertices(self) -> frozenset[int]:
        return self.base.vertices

    @property
    def v(self) -> int:
        return self.base.v

    @property
    def e(self) -> int:
        return self.base.e

    @cached_property
    def class_of(self) -> dict[int, int]:
        return {v: i for i, c in enumerate(self.classes) for v in c}

    @cached_property
    def class_masks(self) -> tuple[int, ...]:
        return tuple(to_mask(c) for c in self.classes)

    @cached_property
    def ordered_edges(self) -> tuple[Edge, ...]:
        """Edges with vertices listed in class order."""
        co = self.class_of
        return tuple(sorted(tuple(sorted(e, key=co.__getitem__)) for e in self.base.edges))

    def link_top(self, x: int) -> "PartitionedHypergraph":
        """Link of a last-class vertex, keeping the remaining classes whole."""
        if self.class_of.get(x) != self.r - 1:
            raise DomainError(f"vertex {x} is not in the last class")
        rest = tuple(tuple(v for v in e if v != x) for e in self.base.edges if x in e)
        return PartitionedHypergraph.build(self.classes[:-1], rest)

    def without_isolated(self) -> "PartitionedHypergraph":
        span = self.base.span
        return PartitionedHypergraph.build([[v for v in c if v in span] for c in self.classes], self.edges)

    def __repr__(self) -> str:
        sizes = ",".join(str(len(c)) for c in self.classes)
        return f"PartitionedHypergraph(r={self.r}, classes=[{sizes}], e={self.e})"


@dataclass(frozen=True)
class SimplicialComplex:
    """A homogeneous k-complex given by its (k+1)-element facets."""

    k: int
    facets: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 0:
            raise DomainError("dimension must be non-negative")
        facets = set()
        for f in self.facets:
            t = tuple(sorted(f))
            if len(t) != self.k + 1 or len(set(t)) != len(t):
                raise DomainError(f"facet {t} is not a {self.k}-simplex (complex must be homogeneous)")
            facets.add(t)
        object.__setattr__(self, "facets", frozenset(facets))

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        facets = [tuple(f) for f in facets]
        if not facets:
            raise DomainError("a complex needs at least one facet to infer its dimension")
        sizes = {len(set(f)) for f in facets}
        if len(sizes) != 1:
            raise DomainError(f"non-homogeneous facet sizes {sorted(sizes)}")
        return cls(sizes.pop() - 1, frozenset(facets))

    @cached_property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for f in self.facets for v in f)

    def as_hypergraph(self) -> Hypergraph:
        return Hypergraph(self.k + 1, self.facets)

    @classmethod
    def from_hypergraph(cls, g: Hypergraph) -> "SimplicialComplex":
        return cls(g.r - 1, g.edges)


AnyGraph = Union[Hypergraph, PartitionedHypergraph]


def base_of(g: AnyGraph) -> Hypergraph:
    return g.base if isinstance(g, PartitionedHypergraph) else g


def _edge_family(j) -> list[Edge]:
    if isinstance(j, (Hypergraph, PartitionedHypergraph)):
        return list(base_of(j).sorted_edges)
    return [tuple(sorted(s)) for s in j]


def link(g: AnyGraph, v: int) -> Hypergraph:
    """The (r-1)-graph of edge remainders of edges through ``v``."""
    g = base_of(g)
    if v not in g.vertices:
        raise DomainError(f"vertex {v} is not in the hypergraph")
    if g.r < 2:
        raise DomainError("links need uniformity at least 2")
    return Hypergraph(g.r - 1, frozenset(tuple(u for u in e if u != v) for e in g.edges if v in e))


def degree(g: AnyGraph, v: int) -> int:
    g = base_of(g)
    if v not in g.vertices:
        raise DomainError(f"vertex {v} is not in the hypergraph")
    return g.degrees[v]


def gamma_mask(g: AnyGraph, family: Iterable[Edge]) -> int:
    """Bitmask of vertices completing every set of ``family`` to an edge of ``g``.

    ``family`` must be nonempty and consist of sorted (r-1)-tuples.
    """
    table = base_of(g).completions
    mask = -1
    for s in family:
        mask &= table.get(s, 0)
        if not mask:
            return 0
    if mask == -1:
        raise DomainError("common neighbourhood of an empty family is undefined")
    return mask


def common_neighbourhood(g: AnyGraph, j) -> frozenset[int]:
    """Vertices completing every edge of ``j`` into an edge of ``g``."""
    gb = base_of(g)
    edges = _edge_family(j)
    if not edges:
        raise DomainError("J must be nonempty")
    if any(len(s) != gb.r - 1 for s in edges):
        raise DomainError(f"J must have uniformity {gb.r - 1}")
    return frozenset(iter_bits(gamma_mask(gb, edges)))


def trace(g: AnyGraph, u: Iterable[int]) -> frozenset[Edge]:
    """Deduplicated family of nonempty intersections of edges with ``u``."""
    u = set(u)
    out = set()
    for e in base_of(g).edges:
        s = tuple(v for v in e if v in u)
        if s:
            out.add(s)
    return frozenset(out)


def trace_i(g: PartitionedHypergraph, i: int) -> PartitionedHypergraph:
    """Trace on the first ``i`` classes, as an i-partite i-graph."""
    if not 1 <= i <= g.r:
        raise DomainError(f"trace level {i} outside 1..{g.r}")
    if i == g.r:
        return g
    keep = set().union(*g.classes[:i])
    edges = {tuple(v for v in e if v in keep) for e in g.edges}
    return PartitionedHypergraph.build(g.classes[:i], edges)


@dataclass(frozen=True)
class TraceBoundCheck:
    ok: bool
    level: int | None = None
    vertex: int | None = None
    degree: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def trace_degree_profile(h: PartitionedHypergraph) -> dict[int, dict[int, int]]:
    """For each level 2..r, the degree of every level-class vertex in that trace."""
    out = {}
    for i in range(2, h.r + 1):
        tr = trace_i(h, i)
        out[i] = {v: tr.base.degrees[v] for v in h.classes[i - 1]}
    return out


def is_trace_bounded(h: PartitionedHypergraph, d: int) -> TraceBoundCheck:
    """Check Deg(v, Tr_i(h)) <= d for all 2 <= i <= r and v in the i-th class."""
    for i, degs in trace_degree_profile(h).items():
        for v in sorted(degs):
            if degs[v] > d:
                return TraceBoundCheck(False, i, v, degs[v])
    return TraceBoundCheck(True)


def _rainbow_count(edges, assign, r) -> int:
    return sum(1 for e in edges if len({assign[v] for v in e}) == r)


def extract_partite(
    g: AnyGraph,
    n: int | None = None,
    seed=0,
    fail_prob: float = 1e-3,
    polish: bool = True,
) -> PartitionedHypergraph:
    """Pass to an r-partite subgraph with n vertices per class and at least (r!/r^r)e(g) edges.

    Vertices are padded with fresh isolated ids up to r*n. The best of several
    uniformly random balanced partitions is kept and then improved by greedy
    vertex swaps.
    """
    if isinstance(g, PartitionedHypergraph):
        sizes = {len(c) for c in g.classes}
        if len(sizes) == 1 and (n is None or sizes == {n}):
            return g
        g = g.base
    r = g.r
    verts = sorted(g.vertices)
    if n is None:
        n = max(1, math.ceil(len(verts) / r))
    if n < 1 or len(verts) > r * n:
        raise DomainError(f"{len(verts)} vertices do not fit into {r} classes of size {n}")
    start = (verts[-1] + 1) if verts else 0
    allv = verts + list(range(start, start + r * n - len(verts)))
    edges = g.sorted_edges
    bound = Fraction(math.factorial(r), r**r) * len(edges)
    rng = np.random.default_rng(seed)
    tries = max(1, math.ceil(math.log2(1 / fail_prob)))
    best, best_count = None, -1
    for _ in range(tries):
        perm = rng.permutation(len(allv))
        assign = {allv[p]: idx // n for idx, p in enumerate(perm)}
        count = _rainbow_count(edges, assign, r)
        if count > best_count:
            best, best_count = assign, count
    if polish or best_count < bound:
        best, best_count = _swap_polish(g, best, allv, best_count)
    if best_count < bound:
        raise RuntimeError("partite extraction fell below the averaging bound")
    classes = [[] for _ in range(r)]
    for v in allv:
        classes[best[v]].append(v)
    kept = [e for e in edges if len({best[v] for v in e}) == r]
    return PartitionedHypergraph(Hypergraph(r, frozenset(kept), frozenset(allv)), tuple(map(tuple, classes)))


def _swap_polish(g: Hypergraph, assign: dict[int, int], allv: list[int], count: int, max_passes: int = 20):
    r = g.r
    inc = g.incidence
    assign = dict(assign)

    def local(vs):
        es = {e for v in vs for e in inc.get(v, ())}
        return es, sum(1 for e in es if len({assign[w] for w in e}) == r)

    for _ in range(max_passes):
        improved = False
        for a_idx, u in enumerate(allv):
            for w in allv[a_idx + 1:]:
                if assign[u] == assign[w] or not (inc.get(u) or inc.get(w)):
                    continue
                es, before = local((u, w))
                assign[u], assign[w] = assign[w], assign[u]
                after = sum(1 for e in es if len({assign[x] for x in e}) == r)
                if after > before:
                    count += after - before
                    improved = True
                else:
                    assign[u], assign[w] = assign[w], assign[u]
        if not improved:
            break
    return assign, count


def random_partite(
    class_sizes: Sequence[int], density: float, rng: np.random.Generator, first_id: int = 0
) -> PartitionedHypergraph:
    """Each class-respecting r-tuple becomes an edge independently with probability ``density``."""
    classes, nxt = [], first_id
    for s in class_sizes:
        classes.append(tuple(range(nxt, nxt + s)))
        nxt += s
    grids = np.meshgrid(*[np.array(c) for c in classes], indexing="ij")
    tuples = np.stack([gr.ravel() for gr in grids], axis=1)
    keep = rng.random(len(tuples)) < density
    return PartitionedHypergraph.build(classes, map(tuple, tuples[keep].tolist()))
