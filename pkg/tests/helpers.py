"""Independent reference computations used to cross-check the library.

Nothing here calls the completion tables, the extension enumerator or the
threshold helpers of the package; comparisons are exact integer/Fraction ones.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from itertools import combinations

import numpy as np

from tracebound.family import canonical_labeling_of, enumerate_family, representative
from tracebound.hypergraph import PartitionedHypergraph
from tracebound.oracle import count_copies


def brute_gamma(g: PartitionedHypergraph, family, edges: set[frozenset] | None = None) -> set[int]:
    """Last-class vertices x with s + x an edge of g for every s in family."""
    if edges is None:
        edges = {frozenset(e) for e in g.edges}
    fam = [frozenset(s) for s in family]
    return {x for x in g.classes[-1] if all(s | {x} in edges for s in fam)}


def le_pow(a, n: int, x: Fraction) -> bool:
    """a <= n**x, exactly."""
    p, q = Fraction(x).numerator, Fraction(x).denominator
    return Fraction(a) ** q <= Fraction(n) ** p


def ge_pow(a, n: int, x: Fraction) -> bool:
    p, q = Fraction(x).numerator, Fraction(x).denominator
    return Fraction(a) ** q >= Fraction(n) ** p


def brute_link(g: PartitionedHypergraph, x: int) -> set[frozenset]:
    return {frozenset(e) - {x} for e in g.edges if x in e}


def trace_key(img, top: set[int]) -> frozenset:
    return frozenset(tuple(sorted(v for v in e if v not in top)) for e in img)


def recount_bad(g_i: PartitionedHypergraph, g_next: PartitionedHypergraph, marked_next, beta, n: int, d: int):
    """Beta-bad copies of every L in H(i, d) inside g_i, from scratch.

    ``marked_next`` maps class codes to sets of marked images at level i+1.
    Marked copies are indexed by their trace instead of enumerating extensions.
    """
    top = set(g_next.classes[-1])
    index: dict[frozenset, Counter] = {}
    for code, imgs in marked_next.items():
        for img in imgs:
            index.setdefault(trace_key(img, top), Counter())[code] += 1
    bad: dict[bytes, set] = {}
    next_edges = {frozenset(e) for e in g_next.edges}
    for cls in enumerate_family(g_i.r, d):
        for rec in count_copies(cls.representative, g_i).copies:
            img = rec.image
            g = len(brute_gamma(g_next, img, next_edges))
            hit = le_pow(g, n, 1 - beta) if g else True
            if not hit:
                v_l = len({v for e in img for v in e})
                for code, c in index.get(frozenset(img), Counter()).items():
                    x = -2 * beta + (1 - beta) * (representative(code).v - v_l - 1)
                    if ge_pow(Fraction(c, g), n, x):
                        hit = True
                        break
            if hit:
                bad.setdefault(cls.code, set()).add(img)
    return bad


def random_marks(g: PartitionedHypergraph, n: int, d: int, delta: Fraction, rng: np.random.Generator):
    """Clustered random marks on copies with at most d edges, each class kept within n**(v - delta)."""
    top = set(g.classes[-1])
    by_low: dict[tuple, list] = {}
    for e in sorted(g.edges):
        by_low.setdefault(tuple(v for v in e if v not in top), []).append(e)
    lows = sorted(by_low)
    marks: dict[bytes, set] = {}

    def budget(code):
        return math.floor(float(n) ** float(representative(code).v - delta) * (1 - 1e-12))

    def offer(img):
        img = tuple(sorted(img))
        code = canonical_labeling_of(img, g.class_of, g.r).code
        bucket = marks.setdefault(code, set())
        if len(bucket) < budget(code):
            bucket.add(img)

    chosen = rng.choice(len(lows), size=max(1, len(lows) // 6), replace=False)
    for k in chosen:
        group = by_low[lows[int(k)]]
        for t in range(1, min(d, len(group)) + 1):
            for sub in combinations(group, t):
                offer(sub)
    edges = sorted(g.edges)
    for _ in range(len(edges)):
        t = int(rng.integers(1, d + 1))
        picks = rng.choice(len(edges), size=t, replace=False)
        offer(edges[int(p)] for p in picks)
    return marks


def relabel_within_classes(g: PartitionedHypergraph, rng) -> tuple[PartitionedHypergraph, dict[int, int]]:
    perm = {}
    for c in g.classes:
        shuffled = [c[int(i)] for i in rng.permutation(len(c))]
        perm.update(zip(c, shuffled))
    return PartitionedHypergraph.build(g.classes, [tuple(perm[v] for v in e) for e in g.edges]), perm
