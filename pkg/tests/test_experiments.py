import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tracebound.errors import DomainError
from tracebound.experiments import (
    ExperimentConfig,
    _unrank,
    exponents_table,
    plant_recover,
    probe_edges,
    random_hypergraph,
    render_rows,
    threshold_scan,
    wilson,
)


def test_exponent_rows():
    rows = {(r["kind"], r["r"], r["d"], r["k"]): r for r in exponents_table(6, 6, 5)}
    assert rows[("alpha", 2, 1, "")]["value"] == "1/10"
    row = rows[("alpha", 3, 1, "")]
    assert row["value"] == "1/40" and row["lower_bound"] == "1/225" and row["bound_holds"]
    k1 = rows[("lambda", 2, 2, 1)]
    assert k1["value"] == "1" and k1["source"] == "prior"
    assert rows[("lambda", 3, 6, 2)]["formula_value"] == "1/1140"


def test_every_bound_holds_to_r8():
    assert all(r["bound_holds"] for r in exponents_table(8, 8, 5))


def test_scan_single_edge_and_empty_cells():
    cfg = ExperimentConfig(target="edge", d=1, n=[10], alphas=[1.5, 2.5], trials=5)
    rows = threshold_scan(cfg)
    assert rows[0]["edges"] >= 1 and rows[0]["containment_frequency"] == 1.0
    assert rows[1]["edges"] == 0 and rows[1]["containment_frequency"] == 0.0


def test_scan_guard_yields_na():
    cfg = ExperimentConfig(target="edge", d=1, n=[100], alphas=[1.0], trials=2, max_vertices=64)
    assert threshold_scan(cfg)[0]["containment_frequency"] == "NA"


def test_scan_is_deterministic_and_pipeline_never_beats_oracle():
    cfg = ExperimentConfig(target="c4", d=2, n=[16], alphas=[1.0, 0.6], trials=10, seed=3, pipeline=True)
    a, b = threshold_scan(cfg), threshold_scan(cfg)
    assert a == b
    assert all(r["pipeline_success"] <= r["contained"] for r in a)


def test_plant_zero_noise():
    cfg = ExperimentConfig(mode="plant-recover", target="path2", d=2, n=[6], noise_density=[0.0], trials=3)
    rows = plant_recover(cfg)
    assert all(r["oracle_success"] == 1 and r["noise_edges"] == 0 for r in rows)
    assert all(r["verified"] == r["pipeline_success"] for r in rows)


def test_plant_dense_noise_successes_verify():
    cfg = ExperimentConfig(mode="plant-recover", target="path2", d=2, n=[16], noise_density=[0.5], trials=10)
    rows = plant_recover(cfg)
    assert all(r["verified"] == r["pipeline_success"] for r in rows)
    assert sum(r["pipeline_success"] for r in rows) > 0


def test_plant_rejects_untrace_bounded_target():
    cfg = ExperimentConfig(mode="plant-recover", target="triangle", d=2, n=[8], trials=1)
    with pytest.raises(DomainError):
        plant_recover(cfg)


def test_config_validation():
    with pytest.raises(DomainError):
        ExperimentConfig(trials=0)
    with pytest.raises(DomainError):
        ExperimentConfig.from_dict({"mode": "threshold-scan", "colour": 1})


def test_wilson_interval_brackets_estimate():
    lo, hi = wilson(7, 20)
    assert lo < 0.35 < hi
    assert wilson(0, 10)[0] == 0.0


@given(st.integers(2, 9), st.integers(1, 3), st.data())
def test_unrank_is_a_bijection(n, r, data):
    if r > n:
        return
    total = math.comb(n, r)
    seen = {_unrank(i, n, r) for i in range(total)}
    assert len(seen) == total and all(len(set(s)) == r and max(s) < n for s in seen)


def test_random_hypergraph_exact_size():
    g = random_hypergraph(12, 3, 50, np.random.default_rng(0))
    assert g.e == 50 and g.v == 12


def test_probe_edges():
    assert probe_edges(32, 2, 1.0) == 32
    assert probe_edges(32, 2, 2.5) == 0
    assert probe_edges(5, 2, 0.0) == 10


def test_render_has_schema_line():
    text = render_rows([{"a": 1}], ",", "# schema: x v1")
    assert text.splitlines() == ["# schema: x v1", "a", "1"]
