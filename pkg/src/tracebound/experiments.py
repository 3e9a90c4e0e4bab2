"""Desk-scale experiments: exponent tables, density scans and plant-and-recover runs.

Every trial draws its randomness from ``SeedSequence([seed, cell, trial])`` so
rows do not depend on execution order.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .embedding import Budgets, run_pipeline
from .errors import DomainError, ResourceLimitError
from .hypergraph import Hypergraph, PartitionedHypergraph, SimplicialComplex, is_trace_bounded, random_partite
from .io import read_graph
from .oracle import find_embedding, verify_embedding
from .schedule import alpha, alpha_lower_bound, lambda_formula, lambda_lower_bound, lambda_value
from .subdivision import homeomorph_target

log = logging.getLogger(__name__)

SCAN_SCHEMA = "# schema: tracebound.threshold_scan v1"
PLANT_SCHEMA = "# schema: tracebound.plant_recover v1"
MODES = ("threshold-scan", "plant-recover", "pipeline", "exponents")


def builtin_target(name: str) -> PartitionedHypergraph:
    """Named targets: edge, c4, triangle (subdivided triangle), path2 (subdivided 2-edge path)."""
    if name == "edge":
        return PartitionedHypergraph.build([[0], [1]], [(0, 1)])
    if name == "c4":
        return PartitionedHypergraph.build([[0, 1], [2, 3]], [(0, 2), (0, 3), (1, 2), (1, 3)])
    if name == "triangle":
        return homeomorph_target(SimplicialComplex.from_facets([(0, 1, 2)]))
    if name == "path2":
        return homeomorph_target(SimplicialComplex.from_facets([(0, 1), (1, 2)]))
    raise DomainError(f"unknown builtin target {name!r}")


def load_target(spec: str) -> PartitionedHypergraph:
    if Path(spec).exists():
        g = read_graph(spec)
        if not isinstance(g, PartitionedHypergraph):
            raise DomainError("target file needs a classes section")
        return g
    return builtin_target(spec)


@dataclass
class ExperimentConfig:
    mode: str = "threshold-scan"
    target: str = "c4"
    r: int | None = None
    d: int = 2
    k: int = 5
    n: list[int] = field(default_factory=lambda: [32])
    alphas: list[float] = field(default_factory=lambda: [1.3, 1.2, 1.1, 1.0, 0.9, 0.8, 0.7, 0.6])
    noise_density: list[float] = field(default_factory=lambda: [0.6])
    trials: int = 200
    seed: int = 0
    out: str | None = None
    pipeline: bool = False
    policy: str = "auto"
    max_vertices: int = 64

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if any(v < 1 for v in self.n):
            raise DomainError("n values must be positive")
        if any(not 0 <= p <= 1 for p in self.noise_density):
            raise DomainError("noise densities must lie in [0, 1]")

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise DomainError(f"unknown config keys: {sorted(extra)}")
        return cls(**obj)

    def to_dict(self) -> dict:
        return asdict(self)


def wilson(k: int, trials: int) -> tuple[float, float]:
    ci = binomtest(k, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def trial_rng(seed: int, cell: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, cell, trial]))


def _unrank(index: int, n: int, r: int) -> tuple[int, ...]:
    """The index-th r-subset of range(n) in colex order."""
    out = []
    for t in range(r, 0, -1):
        c = t - 1
        while math.comb(c + 1, t) <= index:
            c += 1
        out.append(c)
        index -= math.comb(c, t)
    return tuple(sorted(out))


def random_hypergraph(n: int, r: int, m: int, rng: np.random.Generator) -> Hypergraph:
    """Uniformly random r-graph on vertices 0..n-1 with exactly m edges."""
    total = math.comb(n, r)
    if not 0 <= m <= total:
        raise DomainError(f"cannot place {m} edges among {total} r-sets")
    picks = rng.choice(total, size=m, replace=False) if m else []
    return Hypergraph(r, frozenset(_unrank(int(i), n, r) for i in picks), frozenset(range(n)))


def probe_edges(n: int, r: int, a: float) -> int:
    """ceil(n**(r - a)), zero once a exceeds r, capped at C(n, r)."""
    if a > r:
        return 0
    return min(math.comb(n, r), math.ceil(n ** (r - a) - 1e-9))


def threshold_scan(cfg: ExperimentConfig) -> list[dict]:
    h = load_target(cfg.target)
    r = h.r
    if cfg.r is not None and cfg.r != r:
        raise DomainError(f"config r={cfg.r} disagrees with target uniformity {r}")
    if not is_trace_bounded(h, cfg.d):
        raise DomainError(f"target is not {cfg.d}-trace-bounded")
    if any(not 0 < a < r + 1 for a in cfg.alphas):
        log.warning("some probe exponents fall outside (0, r]")
    rows = []
    cell = 0
    for n in cfg.n:
        for a in cfg.alphas:
            m = probe_edges(n, r, a)
            hits = 0
            piped = 0
            status = "ok"
            try:
                if n > cfg.max_vertices:
                    raise ResourceLimitError(f"n={n} exceeds the oracle guard {cfg.max_vertices}")
                for t in range(cfg.trials):
                    rng = trial_rng(cfg.seed, cell, t)
                    g = random_hypergraph(n, r, m, rng)
                    found = find_embedding(h, g) is not None
                    hits += found
                    if cfg.pipeline and m:
                        res = run_pipeline(g, h, cfg.d, rng, Budgets(policy=cfg.policy))
                        if res.success:
                            if not found:
                                raise AssertionError("pipeline found a copy the oracle missed")
                            piped += 1
            except ResourceLimitError as exc:
                status = f"NA: {exc}"
            if status == "ok":
                lo, hi = wilson(hits, cfg.trials)
                row = {"n": n, "alpha_probe": a, "edges": m, "trials": cfg.trials, "contained": hits,
                       "containment_frequency": hits / cfg.trials, "wilson_low": lo, "wilson_high": hi}
            else:
                row = {"n": n, "alpha_probe": a, "edges": m, "trials": cfg.trials, "contained": "NA",
                       "containment_frequency": "NA", "wilson_low": "NA", "wilson_high": "NA"}
                log.warning("cell n=%s alpha=%s skipped: %s", n, a, status)
            if cfg.pipeline:
                row["pipeline_success"] = piped if status == "ok" else "NA"
            rows.append(row)
            log.info("scan n=%d alpha=%.3f edges=%d freq=%s", n, a, m, row["containment_frequency"])
            cell += 1
    return rows


def plant_copy(host: PartitionedHypergraph, h: PartitionedHypergraph, rng) -> tuple[PartitionedHypergraph, dict]:
    """Add the image of h under a random class-respecting injection into host."""
    phi = {}
    for cls_h, cls_g in zip(h.classes, host.classes):
        if len(cls_h) > len(cls_g):
            raise DomainError("host class too small for the planted copy")
        picks = rng.choice(len(cls_g), size=len(cls_h), replace=False)
        phi.update({y: cls_g[int(p)] for y, p in zip(cls_h, picks)})
    edges = set(host.edges) | {tuple(sorted(phi[v] for v in e)) for e in h.edges}
    return PartitionedHypergraph.build(host.classes, edges), phi


def plant_recover(cfg: ExperimentConfig, budgets: Budgets | None = None) -> list[dict]:
    h = load_target(cfg.target)
    check = is_trace_bounded(h, cfg.d)
    if not check:
        raise DomainError(f"target is not {cfg.d}-trace-bounded (vertex {check.vertex}, level {check.level})")
    budgets = budgets or Budgets(policy=cfg.policy)
    rows = []
    cell = 0
    for n in cfg.n:
        for p in cfg.noise_density:
            for t in range(cfg.trials):
                rng = trial_rng(cfg.seed, cell, t)
                noise = random_partite([n] * h.r, p, rng)
                host, _ = plant_copy(noise, h, rng)
                oracle_ok = find_embedding(h, host) is not None
                res = run_pipeline(host, h, cfg.d, rng, budgets)
                verified = bool(res.success and verify_embedding(res.embedding, h, host))
                rows.append({
                    "n": n, "noise_density": p, "trial": t, "noise_edges": noise.e, "host_edges": host.e,
                    "pipeline_success": int(res.success), "verified": int(verified),
                    "oracle_success": int(oracle_ok),
                    "failure_stage": "" if res.success else res.report.stage,
                    "failure_condition": "" if res.success else res.report.condition,
                    "policy": res.policy,
                })
            cell += 1
    return rows


def exponents_table(r_max: int = 6, d_max: int = 6, k_max: int = 5) -> list[dict]:
    if r_max > 8 or k_max > 5:
        raise DomainError("exponent table is limited to r <= 8 and k <= 5")
    rows = []
    for r in range(2, r_max + 1):
        for d in range(1, d_max + 1):
            a, lb = alpha(r, d), alpha_lower_bound(r, d)
            rows.append(_exp_row("alpha", r, d, "", a, lb, "formula"))
    for k in range(1, k_max + 1):
        val, src = lambda_value(k)
        rows.append(_exp_row("lambda", k + 1, math.factorial(k + 1), k, val, lambda_lower_bound(k), src))
        if src == "prior":
            rows[-1]["formula_value"] = str(lambda_formula(k))
    return rows


def _exp_row(kind, r, d, k, value: Fraction, lower: Fraction, source) -> dict:
    return {"kind": kind, "r": r, "d": d, "k": k, "value": str(value), "value_decimal": f"{float(value):.6e}",
            "lower_bound": str(lower), "lower_decimal": f"{float(lower):.6e}", "bound_holds": value >= lower,
            "source": source, "formula_value": ""}


def render_rows(rows: Sequence[dict], delimiter: str = ",", header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(header + "\n")
    if rows:
        keys = list(rows[0])
        for row in rows[1:]:
            keys += [k for k in row if k not in keys]
        w = csv.DictWriter(buf, fieldnames=keys, delimiter=delimiter, lineterminator="\n", restval="")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        print(text, end="")
