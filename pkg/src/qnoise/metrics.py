# -------------------------------------------------------------
# @file          metrics.py
# @author        qnoise contributors
# @created       2026-09-13
# @description   Distances between outcome distributions
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np
from scipy.stats import binomtest

from qnoise.errors import StateError
from qnoise.noise_utils import CONFIDENCE_LEVEL
from qnoise.qstate import Distribution, ShotCounts


def _aligned(p: Distribution, q: Distribution) -> tuple[np.ndarray, np.ndarray]:
    # union of supports, missing outcomes count as zero
    outcomes = sorted(set(p.probs) | set(q.probs))
    return (
        np.array([p.get(o) for o in outcomes], dtype=float),
        np.array([q.get(o) for o in outcomes], dtype=float),
    )


def hellinger(p: Distribution, q: Distribution) -> float:
    a, b = _aligned(p, q)
    h = math.sqrt(float(np.sum((np.sqrt(a) - np.sqrt(b)) ** 2))) / math.sqrt(2.0)
    return min(h, 1.0)


def total_variation(p: Distribution, q: Distribution) -> float:
    a, b = _aligned(p, q)
    return 0.5 * float(np.sum(np.abs(a - b)))


def counts_to_distribution(counts: ShotCounts) -> Distribution:
    if counts.total_shots < 1:
        raise StateError("Cannot normalise zero shots")
    total = counts.total_shots
    return Distribution(counts.n_bits, {o: c / total for o, c in counts.counts.items() if c > 0})


def uniform_distribution(n_outcomes: int) -> Distribution:
    if n_outcomes < 1:
        raise StateError(f"n_outcomes must be at least 1, got {n_outcomes}")
    n_bits = (n_outcomes - 1).bit_length()
    return Distribution(n_bits, {o: 1.0 / n_outcomes for o in range(n_outcomes)})


def pairwise_hellinger(named: Mapping[str, Distribution]) -> dict[tuple[str, str], float]:
    table: dict[tuple[str, str], float] = {}
    for a, b in combinations(named, 2):
        table[(a, b)] = table[(b, a)] = hellinger(named[a], named[b])
    for name in named: table[(name, name)] = 0.0
    return table


@dataclass(frozen=True, slots=True)
class ProportionInterval:
    outcome: int
    count: int
    probability: float
    low: float
    high: float


def confidence_intervals(counts: ShotCounts, level: float = CONFIDENCE_LEVEL) -> list[ProportionInterval]:
    """
    Per-outcome confidence interval of a sampled distribution.

    Each outcome is treated as a binomial over the total shots and gets a
    Wilson score interval, which stays inside [0, 1] for rare outcomes.
    """
    if counts.total_shots < 1:
        raise StateError("Cannot bound zero shots")
    if not 0.0 < level < 1.0:
        raise StateError(f"Confidence level must be in (0, 1), got {level}")

    n = counts.total_shots
    intervals: list[ProportionInterval] = []
    for outcome, c in counts.to_rows():
        ci = binomtest(c, n).proportion_ci(confidence_level=level, method='wilson')
        intervals.append(ProportionInterval(outcome, c, c / n, float(ci.low), float(ci.high)))
    return intervals
