"""Command-line entry point: ``tracebound <verb> ...``.

Exit codes: 0 success, 1 negative decision, 2 domain error, 3 resource error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .embedding import Budgets, run_pipeline
from .errors import DomainError, ResourceLimitError
from .experiments import (
    PLANT_SCHEMA,
    SCAN_SCHEMA,
    ExperimentConfig,
    emit,
    exponents_table,
    plant_recover,
    render_rows,
    threshold_scan,
)
from .family import enumerate_family
from .hypergraph import PartitionedHypergraph
from .io import read_complex, read_graph, write_graph
from .oracle import count_copies, find_embedding
from .subdivision import canonical_subdivide, certify_subdivision

log = logging.getLogger("tracebound")

OK, NEGATIVE, DOMAIN, RESOURCE = 0, 1, 2, 3


def _partitioned(path: str, role: str) -> PartitionedHypergraph:
    g = read_graph(path)
    if not isinstance(g, PartitionedHypergraph):
        raise DomainError(f"{role} {path} needs a classes section")
    return g


def cmd_subdivide(a) -> int:
    s = read_complex(a.input)
    res = canonical_subdivide(s)
    write_graph(res.partition, a.output)
    log.info("subdivided %d facets into %d", len(s.facets), len(res.complex.facets))
    if a.certify:
        d = a.d if a.d is not None else math.factorial(s.k + 1)
        ok = certify_subdivision(res, d)
        print(json.dumps({"certified": ok, "d": d, "facets": len(res.complex.facets),
                          "vertices": res.partition.v}))
        return OK if ok else NEGATIVE
    return OK


def cmd_family(a) -> int:
    rows = [{"code": c.code.decode(), "v": c.v, "e": c.e} for c in enumerate_family(a.r, a.d)]
    emit(render_rows(rows, "\t"), a.out)
    return OK


def cmd_contains(a) -> int:
    h = read_graph(a.target)
    g = read_graph(a.host)
    if isinstance(g, PartitionedHypergraph) and a.plain:
        g = g.base
    wit = find_embedding(h, g)
    if a.witness or a.out:
        text = json.dumps({"contains": wit is not None,
                           "witness": None if wit is None else {str(k): v for k, v in sorted(wit.items())}})
        emit(text + "\n", a.out)
    else:
        print("yes" if wit is not None else "no")
    return OK if wit is not None else NEGATIVE


def cmd_count(a) -> int:
    j = _partitioned(a.pattern, "pattern")
    g = read_graph(a.host)
    res = count_copies(j, g, max_pattern_edges=a.max_edges, max_host_vertices=a.max_vertices)
    if a.out:
        obj = {"count": res.count, "copies": [[list(e) for e in c.image] for c in res.copies]}
        emit(json.dumps(obj) + "\n", a.out)
    print(res.count)
    return OK


def _budgets(a) -> Budgets:
    fields = {}
    if a.budgets:
        p = Path(a.budgets)
        fields = json.loads(p.read_text()) if p.exists() else json.loads(a.budgets)
    if a.policy:
        fields["policy"] = a.policy
    try:
        return Budgets(**fields)
    except TypeError as exc:
        raise DomainError(f"bad budgets: {exc}") from None


def cmd_embed(a) -> int:
    g = read_graph(a.graph)
    h = _partitioned(a.target, "target")
    res = run_pipeline(g, h, a.d, a.seed, _budgets(a))
    if a.report == "json" or a.out:
        emit(json.dumps(res.to_dict(), indent=2) + "\n", a.out)
    else:
        print("success" if res.success else f"failure at {res.report.stage}: {res.report.condition}")
    return OK if res.success else NEGATIVE


def cmd_exponents(a) -> int:
    emit(render_rows(exponents_table(a.r_max, a.d_max, a.k_max), "\t"), a.out)
    return OK


def _experiment_config(a, mode: str) -> ExperimentConfig:
    keys = ("target", "d", "n", "alphas", "noise_density", "trials", "seed", "out", "pipeline", "policy")
    fields = {k: getattr(a, k) for k in keys if getattr(a, k, None) is not None}
    return ExperimentConfig(mode=mode, **fields)


def cmd_scan(a) -> int:
    cfg = _experiment_config(a, "threshold-scan")
    emit(render_rows(threshold_scan(cfg), ",", SCAN_SCHEMA), cfg.out)
    return OK


def cmd_plant(a) -> int:
    cfg = _experiment_config(a, "plant-recover")
    rows = plant_recover(cfg)
    emit(render_rows(rows, ",", PLANT_SCHEMA), cfg.out)
    wins = sum(r["pipeline_success"] for r in rows)
    log.info("pipeline succeeded in %d of %d trials", wins, len(rows))
    return OK


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults")
    common.add_argument("--out", help="output file (stdout when omitted)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="tracebound", description="trace-bounded hypergraph embedding toolkit")
    sub = p.add_subparsers(dest="verb", required=True)
    subs = {}

    def add(name, func, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(func=func)
        subs[name] = s
        return s

    s = add("subdivide", cmd_subdivide, "canonical subdivision of a complex")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--certify", action="store_true")
    s.add_argument("-d", type=int, default=None, help="trace bound to certify (default (k+1)!)")

    s = add("family", cmd_family, "list H(r, d) as TSV")
    s.add_argument("r", type=int)
    s.add_argument("d", type=int)

    s = add("contains", cmd_contains, "exact containment test")
    s.add_argument("--target", required=True)
    s.add_argument("--host", required=True)
    s.add_argument("--witness", action="store_true", help="print the witness map as JSON")
    s.add_argument("--plain", action="store_true", help="ignore the host partition")

    s = add("count", cmd_count, "count copies of a pattern")
    s.add_argument("--pattern", required=True)
    s.add_argument("--host", required=True)
    s.add_argument("--max-edges", type=int, default=12)
    s.add_argument("--max-vertices", type=int, default=64)

    s = add("embed", cmd_embed, "run the randomized embedding pipeline")
    s.add_argument("--graph", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budgets", help="JSON object or file with Budgets fields")
    s.add_argument("--policy", choices=["auto", "asymptotic", "desk"])
    s.add_argument("--report", choices=["json", "text"], default="text")

    s = add("exponents", cmd_exponents, "exact exponent table as TSV")
    s.add_argument("--r-max", type=int, default=6)
    s.add_argument("--d-max", type=int, default=6)
    s.add_argument("--k-max", type=int, default=5)

    for name, func, help_ in (("scan", cmd_scan, "containment frequency across edge densities"),
                              ("plant", cmd_plant, "plant a copy and run the pipeline")):
        s = add(name, func, help_)
        s.add_argument("--target")
        s.add_argument("-d", type=int)
        s.add_argument("--n", type=int, nargs="+")
        s.add_argument("--trials", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--policy", choices=["auto", "asymptotic", "desk"])
        if name == "scan":
            s.add_argument("--alphas", type=float, nargs="+")
            s.add_argument("--pipeline", action="store_true", default=None)
        else:
            s.add_argument("--noise-density", type=float, nargs="+")
    return p, subs


def _apply_config(args, parser, subs, argv):
    if not getattr(args, "config", None):
        return args
    cfg = json.loads(Path(args.config).read_text())
    if not isinstance(cfg, dict):
        raise DomainError("config file must hold a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    cfg.pop("mode", None)
    subs[args.verb].set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser, subs = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return DOMAIN if exc.code else OK
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    try:
        args = _apply_config(args, parser, subs, argv)
        return args.func(args)
    except (DomainError, FileNotFoundError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return DOMAIN
    except ResourceLimitError as exc:
        log.error("resource limit: %s", exc)
        return RESOURCE


if __name__ == "__main__":
    sys.exit(main())
