"""Randomized trace-descent embedding of a d-trace-bounded r-partite r-graph H.

Pipeline, top to bottom:

1. pass to an r-partite host G with n vertices per class;
2. ``initial_link``: pick a last-class vertex whose link G_{r-1} keeps enough
   edges and few copies lying in too few links;
3. ``descend`` repeatedly: pick a link G_i of G_{i+1} whose beta-bad copies are few;
4. ``embed_base``: choose images for the first class avoiding marked sets;
5. ``extend_level`` for classes 2..r-1: random images from common
   neighbourhoods, redrawn until injective and free of marked copies;
6. ``final_level``: greedy distinct images for the last class.

Every existential step of the argument is realized as rejection sampling
followed by exact verification; a stage that cannot be satisfied raises
``PipelineFailure`` carrying a ``FailureReport``.

Threshold policies: ``asymptotic`` uses the thresholds of the argument verbatim. ``desk``
keeps every predicate but replaces the two pool-size thresholds (the B1 bound
n**(1-beta) and the v(H) bound of the initial link) by the number of vertices
that must later be placed injectively into the pool. ``auto`` picks ``desk``
exactly when the host is sparser than the admissible epsilon allows.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Iterator

import numpy as np

from .errors import DomainError, ResourceLimitError
from .family import canonical_labeling_of, class_vertex_count, subgraphs_up_to_d
from .hypergraph import (
    Edge,
    Hypergraph,
    PartitionedHypergraph,
    extract_partite,
    gamma_mask,
    is_trace_bounded,
    iter_bits,
    popcount,
    trace_i,
)
from .oracle import verify_embedding
from .schedule import ParamSchedule, exponent_schedule
from .thresholds import at_least_pow, at_most_pow, pow_float

log = logging.getLogger(__name__)

Image = tuple[Edge, ...]
POLICIES = ("auto", "asymptotic", "desk")


def image_key(edges) -> Image:
    return tuple(sorted(tuple(sorted(e)) for e in edges))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


@dataclass(frozen=True)
class Budgets:
    link_samples: int | None = None  # None: every vertex of the top class
    redraws: int = 100
    base_retries: int = 20
    enum_limit: int = 200_000
    policy: str = "auto"

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise DomainError(f"unknown policy {self.policy!r}")


@dataclass
class FailureReport:
    stage: str
    condition: str
    observed: Any = None
    required: Any = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "condition": self.condition,
            "observed": _jsonable(self.observed),
            "required": _jsonable(self.required),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, bytes):
        return x.decode()
    return x


class PipelineFailure(Exception):
    def __init__(self, report: FailureReport):
        super().__init__(f"{report.stage}: {report.condition}")
        self.report = report


@dataclass(eq=False)
class BadnessLedger:
    """Marked copies of small subgraphs of the level-i host G_i.

    Marks come from explicit entries, from a predicate evaluated on demand, or
    both. ``census`` enumerates every copy with at most d edges and fills
    ``entries``; until then ``entries`` holds the explicit marks only.
    """

    level: int
    host: PartitionedHypergraph
    d: int
    rule: Callable[[Image], bool] | None = None
    structurally_empty: bool = False
    description: str = ""
    entries: dict[bytes, set[Image]] = field(default_factory=dict)
    complete: bool = False
    sizes: dict[bytes, int] = field(default_factory=dict)
    thresholds: dict[bytes, str] = field(default_factory=dict)
    verified: bool | None = None
    _explicit: set[Image] = field(default_factory=set, repr=False)
    _memo: dict[Image, bool] = field(default_factory=dict, repr=False)
    _codes: dict[Image, bytes] = field(default_factory=dict, repr=False)

    @classmethod
    def from_marks(cls, level, host, d, marks, description="explicit") -> "BadnessLedger":
        led = cls(level, host, d, description=description)
        for img in marks:
            img = image_key(img)
            led._explicit.add(img)
            led.entries.setdefault(led.code_of(img), set()).add(img)
        led.complete = True
        return led

    def code_of(self, img: Image) -> bytes:
        code = self._codes.get(img)
        if code is None:
            code = canonical_labeling_of(img, self.host.class_of, self.level).code
            self._codes[img] = code
        return code

    def may_mark(self) -> bool:
        if self.structurally_empty:
            return False
        return self.rule is not None or bool(self._explicit)

    def is_marked(self, img: Image) -> bool:
        if self.structurally_empty:
            return False
        if img in self._explicit:
            return True
        if self.rule is None:
            return False
        hit = self._memo.get(img)
        if hit is None:
            hit = bool(self.rule(img))
            self._memo[img] = hit
        return hit

    def census(self, limit: int) -> dict[bytes, set[Image]]:
        """Enumerate all marked copies exactly; raises ResourceLimitError past ``limit`` subsets."""
        if self.complete:
            return self.entries
        if self.structurally_empty:
            self.entries, self.complete = {}, True
            return self.entries
        edges = self.host.base.sorted_edges
        total = sum(math.comb(len(edges), t) for t in range(1, min(self.d, len(edges)) + 1))
        if total > limit:
            raise ResourceLimitError(f"ledger census needs {total} subsets, limit {limit}")
        found: dict[bytes, set[Image]] = {}
        for t in range(1, min(self.d, len(edges)) + 1):
            for sub in combinations(edges, t):
                if self.is_marked(sub):
                    found.setdefault(self.code_of(sub), set()).add(sub)
        self.entries, self.complete = found, True
        return found

    def check_sizes(self, n: int, exponent: Callable[[int], Fraction], limit: int) -> tuple[bool, dict]:
        """Verify |entries[J]| <= n**exponent(v(J)) for every class; unverifiable past the limit."""
        try:
            entries = self.census(limit)
        except ResourceLimitError as exc:
            self.verified = None
            return True, {"unverified": str(exc)}
        worst = {}
        ok = True
        for code, imgs in entries.items():
            x = exponent(class_vertex_count(code))
            self.sizes[code] = len(imgs)
            self.thresholds[code] = str(x)
            if not at_most_pow(len(imgs), n, x):
                ok = False
                worst = {"class": code.decode(), "count": len(imgs), "bound": pow_float(n, x)}
        self.verified = ok
        return ok, worst

    def total_marked(self) -> int:
        return sum(len(v) for v in self.entries.values())


@dataclass
class EmbeddingMap:
    """Per-class injective maps phi_j (class index 0-based) and their union Phi."""

    maps: dict[int, dict[int, int]] = field(default_factory=dict)

    def extended(self, j: int, phi: dict[int, int]) -> "EmbeddingMap":
        return EmbeddingMap({**self.maps, j: dict(phi)})

    @property
    def full(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for j in sorted(self.maps):
            out.update(self.maps[j])
        return out

    def image_of(self, edges) -> Image:
        full = self.full
        return image_key(tuple(full[v] for v in e) for e in edges)


@dataclass
class LinkStep:
    graph: PartitionedHypergraph
    ledger: BadnessLedger
    vertex: int
    tried: int
    info: dict = field(default_factory=dict)


def resolve_policy(policy: str, sched: ParamSchedule) -> str:
    if policy == "auto":
        return "desk" if sched.below_threshold else "asymptotic"
    return policy


def _extension_images(low: Image, g_next: PartitionedHypergraph, d: int, limit: int) -> Iterator[Image]:
    """Edge sets J' of g_next with at most d edges whose lower trace is exactly ``low``."""
    if len(low) > d:
        return
    top = g_next.r - 1
    table = g_next.base.completions
    topmask = g_next.class_masks[top]
    options = [[tuple(sorted(s + (x,))) for x in iter_bits(table.get(s, 0) & topmask)] for s in low]
    if any(not o for o in options):
        return
    produced = 0

    def rec(k: int, budget: int, acc: list):
        nonlocal produced
        if k == len(options):
            produced += 1
            if produced > limit:
                raise ResourceLimitError(f"more than {limit} extensions of a copy")
            yield tuple(sorted(acc))
            return
        remaining = len(options) - k - 1
        for size in range(1, budget - remaining + 1):
            for combo in combinations(options[k], size):
                yield from rec(k + 1, budget - size, acc + list(combo))

    yield from rec(0, d, [])


def b2_threshold_exponent(beta: Fraction, v_j: int, v_l: int) -> Fraction:
    """Exponent x with n**x = n**(-2 beta) * (n**(1-beta))**(v(J)-v(L)-1)."""
    return -2 * beta + (1 - beta) * (v_j - v_l - 1)


def is_beta_bad(
    low: Image,
    g_next: PartitionedHypergraph,
    ledger_next: BadnessLedger,
    beta: Fraction,
    n: int,
    *,
    pool_floor: int | None = None,
    limit: int = 200_000,
) -> bool:
    """B1 (small common neighbourhood) or B2 (many marked extensions) for a copy of L in G_i.

    ``pool_floor`` switches B1 to the desk form |Gamma| < pool_floor.
    """
    low = image_key(low)
    g = popcount(gamma_mask(g_next, low))
    if pool_floor is None:
        if at_most_pow(g, n, 1 - beta):
            return True
    elif g < pool_floor:
        return True
    if g == 0:
        return True
    if not ledger_next.may_mark():
        return False
    counts: Counter = Counter()
    for ext in _extension_images(low, g_next, ledger_next.d, limit):
        if ledger_next.is_marked(ext):
            counts[ledger_next.code_of(ext)] += 1
    v_l = len({v for e in low for v in e})
    for code, c in counts.items():
        x = b2_threshold_exponent(beta, class_vertex_count(code), v_l)
        if at_least_pow(Fraction(c, g), n, x):
            return True
    return False


def _link_candidates(g: PartitionedHypergraph, rng, samples):
    top = list(g.classes[-1])
    order = [top[i] for i in rng.permutation(len(top))]
    return order if samples is None else order[:samples]


def initial_link(
    g: PartitionedHypergraph,
    h: PartitionedHypergraph,
    sched: ParamSchedule,
    seed=0,
    *,
    policy: str = "asymptotic",
    samples: int | None = None,
    limit: int = 200_000,
) -> LinkStep:
    """Link of a last-class vertex with enough edges and few copies lying in too few links."""
    rng = _rng(seed)
    r, n, d = g.r, sched.n, sched.d
    need = h.v if policy == "asymptotic" else len(h.classes[-1])
    threshold = sched.edge_threshold(r - 1)
    failures: Counter = Counter()
    last: dict = {}
    tried = 0
    for x in _link_candidates(g, rng, samples):
        tried += 1
        gp = g.link_top(x)
        if gp.e < threshold:
            failures["edge count"] += 1
            last["edge count"] = (gp.e, threshold)
            continue

        def rule(img, _g=g, _need=need):
            return popcount(gamma_mask(_g, img)) < _need

        ledger = BadnessLedger(r - 1, gp, d, rule=rule, structurally_empty=need <= 1,
                               description=f"copies lying in fewer than {need} links")
        ok, worst = ledger.check_sizes(n, lambda v: Fraction(v) - Fraction(1, 2), limit)
        if not ok:
            failures["ledger size"] += 1
            last["ledger size"] = (worst["count"], worst["bound"])
            continue
        info = {"edges": gp.e, "edge_threshold": threshold, "need": need,
                "ledger_verified": ledger.verified, "marked": ledger.total_marked(),
                "note": worst.get("unverified", "")}
        return LinkStep(gp, ledger, x, tried, info)
    cond = failures.most_common(1)[0][0] if failures else "no candidate vertices"
    obs, req = last.get(cond, (None, None))
    raise PipelineFailure(FailureReport("initial_link", cond, obs, req, {"tried": tried, "failures": dict(failures)}))


def descend(
    g_next: PartitionedHypergraph,
    ledger_next: BadnessLedger,
    sched: ParamSchedule,
    seed=0,
    *,
    pool_floor: int | None = None,
    samples: int | None = None,
    limit: int = 200_000,
) -> LinkStep:
    """One trace-descent step from level i+1 to level i via the link of a top-class vertex."""
    rng = _rng(seed)
    i = g_next.r - 1
    if i < 1 or i not in sched.beta:
        raise DomainError(f"no beta_{i} in a schedule for r={sched.r}")
    beta, delta, n = sched.beta[i], sched.delta[i], sched.n
    threshold = sched.edge_threshold(i)
    failures: Counter = Counter()
    last: dict = {}
    tried = 0
    for x in _link_candidates(g_next, rng, samples):
        tried += 1
        gi = g_next.link_top(x)
        if gi.e < threshold:
            failures["edge count"] += 1
            last["edge count"] = (gi.e, threshold)
            continue

        def rule(img, _g=g_next, _l=ledger_next):
            return is_beta_bad(img, _g, _l, beta, n, pool_floor=pool_floor, limit=limit)

        ledger = BadnessLedger(i, gi, sched.d, rule=rule, description=f"beta_{i}-bad copies")
        ok, worst = ledger.check_sizes(n, lambda v: Fraction(v) - delta, limit)
        if not ok:
            failures["ledger size"] += 1
            last["ledger size"] = (worst["count"], worst["bound"])
            continue
        info = {"edges": gi.e, "edge_threshold": threshold, "beta": str(beta), "delta": str(delta),
                "ledger_verified": ledger.verified, "marked": ledger.total_marked(),
                "note": worst.get("unverified", "")}
        return LinkStep(gi, ledger, x, tried, info)
    cond = failures.most_common(1)[0][0] if failures else "no candidate vertices"
    obs, req = last.get(cond, (None, None))
    raise PipelineFailure(FailureReport(f"descend[{i}]", cond, obs, req, {"tried": tried, "failures": dict(failures)}))


def embed_base(
    g1: PartitionedHypergraph,
    ledger1: BadnessLedger,
    h: PartitionedHypergraph,
    sched: ParamSchedule,
    seed=0,
    *,
    retries: int = 20,
) -> EmbeddingMap:
    """Images for the first class: a set S of |Y_1| vertices of G_1 containing no marked t-set."""
    rng = _rng(seed)
    y1 = list(h.classes[0])
    pool = sorted(e[0] for e in g1.edges)
    if len(y1) > len(pool):
        raise DomainError(f"|Y_1| = {len(y1)} exceeds v(G_1) = {len(pool)}")
    d = sched.d
    best = 0
    for _ in range(max(1, retries)):
        chosen: list[int] = []
        for c in (pool[k] for k in rng.permutation(len(pool))):
            clean = True
            for t in range(0, min(d, len(chosen) + 1)):
                for rest in combinations(chosen, t):
                    if ledger1.is_marked(image_key([(v,) for v in rest + (c,)])):
                        clean = False
                        break
                if not clean:
                    break
            if clean:
                chosen.append(c)
                if len(chosen) == len(y1):
                    return EmbeddingMap({0: dict(zip(sorted(y1), chosen))})
        best = max(best, len(chosen))
    raise PipelineFailure(FailureReport("embed_base", "too few placeable vertices", best, len(y1),
                                        {"pool": len(pool), "retries": retries}))


def _level_links(h: PartitionedHypergraph, j: int) -> tuple[PartitionedHypergraph, dict[int, list[Edge]]]:
    """Tr_j(H) and, for each y in the j-th class, its link in Tr_j(H)."""
    tr = trace_i(h, j)
    links = {y: [tuple(v for v in e if v != y) for e in tr.base.incidence[y]] for y in h.classes[j - 1]}
    return tr, links


def extend_level(
    phi_prev: EmbeddingMap,
    g_j: PartitionedHypergraph,
    ledger_j: BadnessLedger,
    h: PartitionedHypergraph,
    sched: ParamSchedule,
    seed=0,
    *,
    redraws: int = 100,
    limit: int = 200_000,
) -> EmbeddingMap:
    """Random images for class j from common neighbourhoods, redrawn until E1 and E2 hold."""
    rng = _rng(seed)
    j = g_j.r
    tr, links = _level_links(h, j)
    full = phi_prev.full
    pools = {}
    for y in sorted(links):
        low = image_key(tuple(full[v] for v in s) for s in links[y])
        pool = list(iter_bits(gamma_mask(g_j, low) & g_j.class_masks[j - 1]))
        if not pool:
            raise PipelineFailure(FailureReport(f"extend_level[{j}]", "empty common neighbourhood", 0, 1, {"y": y}))
        pools[y] = pool
    subgraphs = [rec.image for _, recs in subgraphs_up_to_d(tr, sched.d, limit=limit) for rec in recs]
    fails: Counter = Counter()
    ys = sorted(pools)
    for _ in range(max(1, redraws)):
        phi = {y: pools[y][int(rng.integers(len(pools[y])))] for y in ys}
        if len(set(phi.values())) != len(phi):
            fails["E1"] += 1
            continue
        trial = {**full, **phi}
        if any(ledger_j.is_marked(image_key(tuple(trial[v] for v in e) for e in sub)) for sub in subgraphs):
            fails["E2"] += 1
            continue
        return phi_prev.extended(j - 1, phi)
    raise PipelineFailure(FailureReport(f"extend_level[{j}]", "redraw budget exhausted", dict(fails), redraws,
                                        {"pool_sizes": {y: len(p) for y, p in pools.items()}}))


def final_level(
    phi_prev: EmbeddingMap,
    g: PartitionedHypergraph,
    ledger_prev: BadnessLedger | None,
    h: PartitionedHypergraph,
) -> EmbeddingMap:
    """Greedy distinct images for the last class, then an edge-by-edge check of the whole map."""
    r = g.r
    full = phi_prev.full
    pools = {}
    for y in h.classes[r - 1]:
        low = image_key(tuple(full[v] for v in e if v != y) for e in h.base.incidence[y])
        pools[y] = list(iter_bits(gamma_mask(g, low) & g.class_masks[r - 1]))
    used: set[int] = set()
    phi = {}
    for y in sorted(pools, key=lambda y: (len(pools[y]), y)):
        pick = next((x for x in pools[y] if x not in used), None)
        if pick is None:
            raise PipelineFailure(FailureReport(f"final_level[{r}]", "common neighbourhood exhausted",
                                                len(pools[y]), len(used) + 1, {"y": y}))
        phi[y] = pick
        used.add(pick)
    out = phi_prev.extended(r - 1, phi)
    verdict = verify_embedding(out.full, h, g)
    if not verdict:
        raise PipelineFailure(FailureReport("final_verification", verdict.violation))
    return out


@dataclass
class PipelineResult:
    success: bool
    embedding: dict[int, int] | None
    report: FailureReport | None
    schedule: ParamSchedule | None
    policy: str
    stages: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "embedding": None if self.embedding is None else {str(k): v for k, v in sorted(self.embedding.items())},
            "failure": None if self.report is None else self.report.to_dict(),
            "schedule": None if self.schedule is None else self.schedule.to_dict(),
            "policy": self.policy,
            "stages": _jsonable(self.stages),
        }


def run_pipeline(
    g_raw: Hypergraph | PartitionedHypergraph,
    h: PartitionedHypergraph,
    d: int,
    seed=0,
    budgets: Budgets = Budgets(),
) -> PipelineResult:
    """Search for a copy of a d-trace-bounded h in g_raw; the result is verified or a structured failure."""
    if h.r < 2:
        raise DomainError("target must have uniformity at least 2")
    base_r = g_raw.r
    if base_r != h.r:
        raise DomainError(f"uniformity mismatch: target {h.r}, host {base_r}")
    check = is_trace_bounded(h, d)
    if not check:
        raise DomainError(f"target is not {d}-trace-bounded: vertex {check.vertex} has degree "
                          f"{check.degree} in trace level {check.level}")
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(2**63))
    seeds = np.random.SeedSequence(seed).spawn(h.r + 3)
    rngs = [np.random.default_rng(s) for s in seeds]
    stages: list[dict] = []
    sched = None
    policy = budgets.policy
    core = h.without_isolated()
    isolated = sorted(h.vertices - core.vertices)
    try:
        g = extract_partite(g_raw, seed=rngs[0])
        stages.append({"stage": "extract_partite", "n": len(g.classes[0]), "edges": g.e})
        n = len(g.classes[0])
        if core.e == 0:
            emb = EmbeddingMap()
        else:
            if g.e < 2**h.r or n < 2:
                raise PipelineFailure(FailureReport("extract_partite", "edge count", g.e, 2**h.r))
            sched = exponent_schedule(h.r, d, n, g.e)
            policy = resolve_policy(budgets.policy, sched)
            emb = _embed_core(g, core, sched, policy, budgets, rngs, stages)
        emb = _place_isolated(emb, g, h, isolated, g_raw)
        verdict = verify_embedding(emb.full, h, g)
        if not verdict:
            raise PipelineFailure(FailureReport("final_verification", verdict.violation))
        stages.append({"stage": "verify", "ok": True})
        return PipelineResult(True, emb.full, None, sched, policy, stages)
    except PipelineFailure as exc:
        log.info("pipeline failed: %s", exc)
        return PipelineResult(False, None, exc.report, sched, policy, stages)
    except ResourceLimitError as exc:
        report = FailureReport(stages[-1]["stage"] if stages else "setup", "resource guard", str(exc))
        return PipelineResult(False, None, report, sched, policy, stages)


def _embed_core(g, h, sched, policy, budgets, rngs, stages) -> EmbeddingMap:
    r = h.r
    limit = budgets.enum_limit
    step = initial_link(g, h, sched, rngs[1], policy=policy, samples=budgets.link_samples, limit=limit)
    stages.append({"stage": "initial_link", "vertex": step.vertex, "tried": step.tried, **step.info})
    levels = {r - 1: step}
    for i in range(r - 2, 0, -1):
        floor = len(h.classes[i]) if policy == "desk" else None
        nxt = levels[i + 1]
        step = descend(nxt.graph, nxt.ledger, sched, rngs[2 + i], pool_floor=floor,
                       samples=budgets.link_samples, limit=limit)
        stages.append({"stage": f"descend[{i}]", "vertex": step.vertex, "tried": step.tried, **step.info})
        levels[i] = step
    try:
        emb = embed_base(levels[1].graph, levels[1].ledger, h, sched, rngs[-2], retries=budgets.base_retries)
    except DomainError as exc:
        raise PipelineFailure(FailureReport("embed_base", "base level too small", levels[1].graph.e,
                                            len(h.classes[0]), {"error": str(exc)})) from None
    stages.append({"stage": "embed_base", "placed": len(emb.full)})
    for j in range(2, r):
        emb = extend_level(emb, levels[j].graph, levels[j].ledger, h, sched, rngs[-1],
                           redraws=budgets.redraws, limit=limit)
        stages.append({"stage": f"extend_level[{j}]", "placed": len(emb.full)})
    emb = final_level(emb, g, levels[r - 1].ledger, h)
    stages.append({"stage": f"final_level[{r}]", "placed": len(emb.full)})
    return emb


def _place_isolated(emb: EmbeddingMap, g: PartitionedHypergraph, h: PartitionedHypergraph, isolated, g_raw) -> EmbeddingMap:
    if not isolated:
        return emb
    raw_vertices = g_raw.vertices
    used = set(emb.full.values())
    maps = {k: dict(v) for k, v in emb.maps.items()}
    for y in isolated:
        c = h.class_of[y]
        free = [x for x in g.classes[c] if x not in used]
        free.sort(key=lambda x: (x not in raw_vertices, x))
        if not free:
            raise PipelineFailure(FailureReport("isolated_vertices", "class exhausted", 0, 1, {"y": y}))
        maps.setdefault(c, {})[y] = free[0]
        used.add(free[0])
    return EmbeddingMap(maps)
