"""Containment frequency of C4 in uniform random graphs on 32 vertices across eight edge densities."""

import argparse
import logging

from tracebound.experiments import SCAN_SCHEMA, ExperimentConfig, emit, render_rows, threshold_scan


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pipeline", action="store_true", help="also run the embedding pipeline per trial")
    p.add_argument("--out", default="threshold_scan_c4.csv")
    a = p.parse_args()
    logging.basicConfig(level=logging.INFO)
    cfg = ExperimentConfig(target="c4", d=2, n=[32], trials=a.trials, seed=a.seed, pipeline=a.pipeline,
                           alphas=[1.35, 1.25, 1.15, 1.05, 0.95, 0.85, 0.75, 0.65], out=a.out)
    emit(render_rows(threshold_scan(cfg), ",", SCAN_SCHEMA), cfg.out)


if __name__ == "__main__":
    main()
