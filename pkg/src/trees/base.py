"""
Shared types for the comparison-instrumented search trees.

Every tree in this package counts "comparisons" the same way: one per node
visited on a root-to-target search path, with the root counting as 1. This
keeps totals commensurable across treaps, splay trees and red-black trees.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

logger = logging.getLogger(__name__)


class TreeError(Exception):
    """Base exception for search tree errors."""

    pass


class DuplicateKeyError(TreeError):
    """Raised when inserting a key that is already present."""

    def __init__(self, key: int):
        self.key = key
        super().__init__(f"Key {key} is already present.")


class KeyNotFoundError(TreeError, KeyError):
    """Raised when an operation requires a key that is absent."""

    def __init__(self, key: int):
        self.key = key
        super().__init__(f"Key {key} is not present.")

    def __str__(self) -> str:
        return self.args[0]


class InvalidRangeError(TreeError, ValueError):
    """Raised when a range query has lo > hi."""

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi
        super().__init__(f"Invalid range: lo={lo} is greater than hi={hi}.")


class RankOutOfRangeError(TreeError, IndexError):
    """Raised when an order statistic is requested outside 1..count."""

    def __init__(self, k: int, count: int):
        self.k = k
        self.count = count
        super().__init__(f"Rank {k} is outside 1..{count}.")


class InvariantViolation(TreeError, AssertionError):
    """Raised by validate() naming the first broken invariant."""

    def __init__(self, invariant: str, key: Optional[int], detail: str = ""):
        self.invariant = invariant
        self.key = key
        message = f"{invariant} invariant violated at key {key}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class Priority(NamedTuple):
    """
    Treap priority ordered lexicographically by (primary, tiebreak).

    `primary` carries the learned frequency, rank score, or random draw;
    `tiebreak` is a uniform draw that makes equal primaries comparable.
    """

    primary: float
    tiebreak: float


@dataclass(frozen=True, slots=True)
class AccessResult:
    found: bool
    comparisons: int
    value: Optional[int] = None


class CountingTree:
    """
    Counter bookkeeping shared by all instrumented trees.

    `comparisons` and `rotations` are monotone until `reset_counters()`;
    `overhead_ops` holds work that is not a tree-path comparison (map
    lookups, pointer hops) and stays zero for plain trees.
    """

    name = "tree"

    def __init__(self):
        self.comparisons = 0
        self.rotations = 0
        self.overhead_ops = 0
        self.ops = 0

    def reset_counters(self) -> None:
        self.comparisons = 0
        self.rotations = 0
        self.overhead_ops = 0
        self.ops = 0

    def counters(self) -> dict:
        return {
            "comparisons": self.comparisons,
            "rotations": self.rotations,
            "overhead_ops": self.overhead_ops,
            "ops": self.ops,
        }
