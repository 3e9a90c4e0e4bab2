"""Exact exponent table: alpha(r, d) against (5rd)^(1-r) and lambda_k against k^(-2k^2)."""

import argparse

from tracebound.experiments import emit, exponents_table, render_rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--r-max", type=int, default=8)
    p.add_argument("--d-max", type=int, default=8)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--out")
    a = p.parse_args()
    emit(render_rows(exponents_table(a.r_max, a.d_max, a.k_max), "\t"), a.out)


if __name__ == "__main__":
    main()
