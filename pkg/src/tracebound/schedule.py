"""Turán exponents and the epsilon/delta/beta parameter schedule of the embedding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError

# Known exponents for dimensions one and two that beat the general formula.
PRIOR_LAMBDA = {1: Fraction(1), 2: Fraction(1, 5)}


def alpha(r: int, d: int) -> Fraction:
    """(1/(10d)) * (1/(rd+1))**(r-2)."""
    if r < 2 or d < 1:
        raise DomainError("alpha needs r >= 2 and d >= 1")
    return Fraction(1, 10 * d) * Fraction(1, r * d + 1) ** (r - 2)


def alpha_lower_bound(r: int, d: int) -> Fraction:
    """(5rd)**(1-r)."""
    return Fraction(1, (5 * r * d) ** (r - 1))


def epsilon_cap(r: int, d: int) -> Fraction:
    """Largest admissible epsilon: (1/(9d)) * (1/(rd+1))**(r-2)."""
    return Fraction(1, 9 * d) * Fraction(1, r * d + 1) ** (r - 2)


def lambda_formula(k: int) -> Fraction:
    """Homeomorph exponent from the hypergraph bound: alpha(k+1, (k+1)!)."""
    if k < 1:
        raise DomainError("k must be positive")
    return alpha(k + 1, math.factorial(k + 1))


def lambda_lower_bound(k: int) -> Fraction:
    """k**(-2k^2)."""
    return Fraction(1, k ** (2 * k * k))


def lambda_value(k: int) -> tuple[Fraction, str]:
    """Best available exponent and where it comes from ('prior' or 'formula')."""
    if k in PRIOR_LAMBDA:
        return PRIOR_LAMBDA[k], "prior"
    return lambda_formula(k), "formula"


@dataclass(frozen=True)
class ParamSchedule:
    r: int
    d: int
    n: int
    m_edges: int
    epsilon: Fraction
    alpha: Fraction
    delta: dict[int, Fraction] = field(compare=False)
    beta: dict[int, Fraction] = field(compare=False)
    epsilon_observed: float = float("nan")
    below_threshold: bool = False

    def edge_threshold(self, i: int) -> Fraction:
        """2**i * n**(i - eps_obs), written exactly through m = 2**r * n**(r - eps_obs)."""
        return Fraction(self.m_edges * (2 * self.n) ** i, (2 * self.n) ** self.r)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "d": self.d,
            "n": self.n,
            "m_edges": self.m_edges,
            "epsilon": str(self.epsilon),
            "epsilon_observed": self.epsilon_observed,
            "alpha": str(self.alpha),
            "delta": {i: str(v) for i, v in self.delta.items()},
            "beta": {i: str(v) for i, v in self.beta.items()},
            "below_threshold": self.below_threshold,
        }


def schedule_chain(r: int, d: int, epsilon: Fraction) -> tuple[dict[int, Fraction], dict[int, Fraction]]:
    """delta[r-1] = 1/2, beta[i] = delta[i+1]/((i+1)d+1), delta[i] = beta[i] - 2 eps."""
    delta = {r - 1: Fraction(1, 2)}
    beta: dict[int, Fraction] = {}
    for i in range(r - 2, 0, -1):
        beta[i] = delta[i + 1] / ((i + 1) * d + 1)
        delta[i] = beta[i] - 2 * epsilon
    return delta, beta


def check_chain(r: int, d: int, epsilon: Fraction, delta, beta) -> None:
    deltas = [delta[i] for i in range(r - 1, 0, -1)]
    assert deltas[0] == Fraction(1, 2)
    assert all(a >= b for a, b in zip(deltas, deltas[1:])), "delta chain not monotone"
    assert deltas[-1] > d * epsilon, "delta_1 <= d*eps"
    betas = [beta[i] for i in range(r - 2, 0, -1)]
    if betas:
        assert betas[0] <= Fraction(1, 2)
        assert all(a >= b for a, b in zip(betas, betas[1:])), "beta chain not monotone"
        assert betas[-1] > 0


def exponent_schedule(r: int, d: int, n: int, m_edges: int) -> ParamSchedule:
    """Solve eps from m = 2**r * n**(r - eps), clamp it, and derive the delta/beta chain.

    If the solved value exceeds the admissible cap the schedule is flagged
    ``below_threshold`` and built with the cap.
    """
    if r < 2 or d < 1:
        raise DomainError("schedule needs r >= 2 and d >= 1")
    if n < 2:
        raise DomainError("schedule needs n >= 2")
    if m_edges < 2**r:
        raise DomainError(f"need at least 2**r = {2**r} edges for epsilon to be defined")
    cap = epsilon_cap(r, d)
    solved = (r * math.log(n) - math.log(m_edges / 2**r)) / math.log(n)
    if solved > cap:
        eps, flag = cap, True
    elif solved <= 0:
        eps, flag = cap, False
    else:
        eps = min(cap, Fraction(math.ceil(solved * 10**9), 10**9))
        flag = False
    delta, beta = schedule_chain(r, d, eps)
    check_chain(r, d, eps, delta, beta)
    return ParamSchedule(r, d, n, m_edges, eps, alpha(r, d), delta, beta, solved, flag)
