"""
Closed-form expectations and bounds for learned and random treaps.

Conventions: "depth" and "cost" in this module follow the one-based
comparison count (root = 1) unless a function says it is zero-based. The
classic random-treap formulas are zero-based; add 1 to compare them with
comparison counts.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-12


class AnalyticsError(ValueError):
    """Raised for parameters outside a formula's domain."""

    pass


class InvalidDistributionError(AnalyticsError):
    """Raised when probabilities are negative, unsorted or not normalized."""

    pass


def _require_count(name: str, value: int, minimum: int = 1) -> None:
    if value < minimum:
        raise AnalyticsError(f"{name} must be >= {minimum}, got {value}")


def harmonic_numbers(n: int) -> np.ndarray:
    """Array H with H[i] = 1 + 1/2 + ... + 1/i for 0 <= i <= n."""
    _require_count("n", n, 0)
    out = np.zeros(n + 1)
    np.cumsum(1.0 / np.arange(1, n + 1), out=out[1:])
    return out


def harmonic(n: int) -> float:
    _require_count("n", n)
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def generalized_harmonic(n: int, alpha: float) -> float:
    """H_{n,alpha} = sum of 1 / i**alpha for i = 1..n."""
    _require_count("n", n)
    if alpha <= 0:
        raise AnalyticsError(f"alpha must be > 0, got {alpha}")
    return float(np.sum(np.arange(1, n + 1, dtype=float) ** -alpha))


@dataclass(frozen=True)
class Distribution:
    """
    Access probabilities over ranks, most likely first.

    Build with `from_weights` when the input is unnormalized or unsorted.
    """

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InvalidDistributionError("need a non-empty 1-d vector")
        if np.any(p < 0):
            raise InvalidDistributionError("probabilities must be >= 0")
        if abs(float(p.sum()) - 1.0) > SUM_TOLERANCE:
            raise InvalidDistributionError(
                f"probabilities sum to {float(p.sum())!r}, not 1"
            )
        if np.any(np.diff(p) > 0):
            raise InvalidDistributionError(
                "probabilities must be non-increasing in rank"
            )
        object.__setattr__(self, "probabilities", p)

    @property
    def n(self) -> int:
        return int(self.probabilities.size)

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "Distribution":
        w = np.sort(np.asarray(weights, dtype=float))[::-1]
        total = w.sum()
        if total <= 0:
            raise InvalidDistributionError("weights must have positive sum")
        return cls(w / total)

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        _require_count("n", n)
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int) -> "Distribution":
        _require_count("n", n)
        p = np.zeros(n)
        p[0] = 1.0
        return cls(p)

    def top_mass(self, k: int) -> float:
        # Float summation can overshoot 1 by an ulp.
        return min(1.0, float(self.probabilities[:k].sum()))


def expected_learned_depth(i: int) -> float:
    """Expected one-based depth of the i-th most frequent key: 2H_i - 1."""
    _require_count("i", i)
    return 2.0 * harmonic(i) - 1.0


def expected_random_depth(i: int, n: int) -> float:
    """Zero-based expected depth of key i in a random treap of n keys."""
    _require_count("n", n)
    if not 1 <= i <= n:
        raise AnalyticsError(f"i must be in 1..{n}, got {i}")
    return harmonic(i) + harmonic(n - i + 1) - 2.0


def expected_random_cost(n: int) -> float:
    """
    Zero-based random-treap access cost averaged over a uniformly random
    key position: (1/n) * sum_i (H_i + H_{n-i+1} - 2) = 2(1 + 1/n)H_n - 4.
    """
    _require_count("n", n)
    return 2.0 * (1.0 + 1.0 / n) * harmonic(n) - 4.0


def expected_learned_cost(dist: Distribution) -> float:
    """Sum of p_i (2H_i - 1): expected comparisons per learned access."""
    h = harmonic_numbers(dist.n)[1:]
    return float(np.dot(dist.probabilities, 2.0 * h - 1.0))


def random_cost_lower_bound(n: int) -> float:
    """Zero-based lower bound 2H_{n+1} - 4 on random-treap access cost."""
    _require_count("n", n)
    return 2.0 * harmonic(n + 1) - 4.0


def zipf_distribution(n: int, alpha: float) -> Distribution:
    """p_i = 1 / (i**alpha * H_{n,alpha})."""
    _require_count("n", n)
    if alpha <= 0:
        raise AnalyticsError(f"alpha must be > 0, got {alpha}")
    weights = np.arange(1, n + 1, dtype=float) ** -alpha
    return Distribution(weights / weights.sum())


def zipf_learned_cost(n: int, alpha: float) -> float:
    return expected_learned_cost(zipf_distribution(n, alpha))


def zipf_learned_cost_closed_form(n: int) -> float:
    """
    Alpha = 1 only: 2C/H_n - 1 with C = (H_n**2 + H_{n,2}) / 2.
    """
    _require_count("n", n)
    h_n = harmonic(n)
    c = 0.5 * (h_n**2 + generalized_harmonic(n, 2.0))
    return 2.0 * c / h_n - 1.0


def shannon_entropy(dist: Distribution) -> float:
    """Base-2 entropy with 0 * log 0 taken as 0."""
    p = dist.probabilities[dist.probabilities > 0]
    return float(-np.sum(p * np.log2(p)))


def mehlhorn_bound(dist: Distribution) -> float:
    """Lower bound H / 3 on the weighted path length of any static BST."""
    return shannon_entropy(dist) / 3.0


def noisy_gap_bound(eps: float, delta: float) -> float:
    """Additive per-access gap 2(1 + ln(eps + delta)) for a noisy oracle."""
    if eps < 1 or delta < 1:
        raise AnalyticsError(
            f"eps and delta must be >= 1, got eps={eps}, delta={delta}"
        )
    return 2.0 * (1.0 + math.log(eps + delta))


def topk_expected_cost(k: int, n: int, p: float) -> float:
    """Upper bound 2(p H_k + (1 - p) H_n) - 1 for a top-k oracle."""
    _require_count("n", n)
    if not 1 <= k <= n:
        raise AnalyticsError(f"k must be in 1..{n}, got {k}")
    if not 0.0 <= p <= 1.0:
        raise AnalyticsError(f"p must be in [0, 1], got {p}")
    return 2.0 * (p * harmonic(k) + (1.0 - p) * harmonic(n)) - 1.0
