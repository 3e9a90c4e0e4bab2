"""Exact comparisons of counts against powers n**x with rational x."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

# relative log gap below which the float comparison is not trusted
_LOG_MARGIN = 1e-9


def _log(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def compare_pow(a: Rational | int, n: int, x: Rational | int) -> int:
    """Sign of ``a - n**x`` for rational a >= 0, integer n >= 1 and rational x.

    Decided by logarithms when they are clearly apart, otherwise by the exact
    integer comparison a**q vs n**p for x = p/q.
    """
    a, x = Fraction(a), Fraction(x)
    if a < 0 or n < 1:
        raise ValueError("need a >= 0 and n >= 1")
    if a == 0:
        return -1
    if n == 1:
        return (a > 1) - (a < 1)
    la, lb = _log(a), float(x) * math.log(n)
    if abs(la - lb) > _LOG_MARGIN * max(1.0, abs(lb)):
        return 1 if la > lb else -1
    p, q = x.numerator, x.denominator
    lhs = a**q
    rhs = Fraction(n) ** p
    return (lhs > rhs) - (lhs < rhs)


def at_most_pow(a, n: int, x) -> bool:
    """a <= n**x."""
    return compare_pow(a, n, x) <= 0


def at_least_pow(a, n: int, x) -> bool:
    """a >= n**x."""
    return compare_pow(a, n, x) >= 0


def pow_float(n: int, x) -> float:
    return float(n) ** float(x)
