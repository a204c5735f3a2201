"""
Dual structure that decouples key order from rank order.

A learned treap is keyed on hashed surrogates s = h(key) and carries the
oracle priorities; a random treap is keyed on the identities themselves
with i.i.d. priorities. Each learned node points at its random-treap
partner, so a lookup is: surrogate, learned-treap search, one pointer hop.

Counters on this object are the ones reported by the benchmarks:
comparisons are learned-treap path nodes only (range queries use random
treap paths); map lookups, hash evaluations and pointer hops go to
`overhead_ops`.
"""

import logging
from typing import Dict, Optional, Tuple, Union

import numpy as np

from src.hashing import FourWiseHash, HashCollisionError
from src.trees.base import (
    AccessResult,
    CountingTree,
    DuplicateKeyError,
    InvariantViolation,
    KeyNotFoundError,
    Priority,
)
from src.trees.treap import Treap, TreapNode

logger = logging.getLogger(__name__)


class ShuffledTreap(CountingTree):
    """
    Parameters:
        hash_fn (FourWiseHash): surrogate generator.
        seed: seeds the random treap's priorities.
        store_map (bool): keep an explicit identity -> surrogate map; when
            False the surrogate is recomputed from the hash on demand.
    """

    name = "shuffled_learned_treap"

    def __init__(
        self,
        hash_fn: FourWiseHash,
        seed: Union[None, int, np.random.SeedSequence] = None,
        store_map: bool = True,
    ):
        super().__init__()
        self.hash_fn = hash_fn
        self.learned = Treap()
        self.random = Treap()
        self.key_map: Optional[Dict[int, int]] = {} if store_map else None
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return self.random.count

    def __contains__(self, key: int) -> bool:
        return key in self.random

    def reset_counters(self) -> None:
        super().reset_counters()
        self.learned.reset_counters()
        self.random.reset_counters()

    def surrogate(self, key: int) -> Optional[int]:
        """Surrogate key for `key`; None if the map says it is absent."""
        self.overhead_ops += 1
        if self.key_map is not None:
            return self.key_map.get(key)
        return self.hash_fn.raw(key)

    def _random_priority(self) -> Priority:
        return Priority(float(self._rng.random()), float(self._rng.random()))

    def _learned_node(self, key: int) -> Tuple[Optional[TreapNode], int]:
        """Counted learned-treap lookup of `key`'s node and path length."""
        surrogate = self.surrogate(key)
        if surrogate is None:
            return None, 0
        node, visits = self.learned.access_node(surrogate)
        self.comparisons += visits
        # In hash-only mode a foreign key can land on an occupied surrogate.
        if node is not None and node.partner.key != key:
            node = None
        return node, visits

    # --- Mutation ---

    def insert(
        self, key: int, value: int = 1, learned_priority=None
    ) -> None:
        """
        Insert `key` into both trees and link the pair.

        Raises:
            DuplicateKeyError: key already stored.
            HashCollisionError: another key owns the same surrogate; the
                structure is unchanged.
        """
        if learned_priority is None:
            raise TypeError("insert() requires a learned priority")
        if key in self.random:
            raise DuplicateKeyError(key)
        surrogate = self.hash_fn.raw(key)
        self.overhead_ops += 1
        owner = self.learned.find(surrogate)
        if owner is not None:
            raise HashCollisionError(key, owner.partner.key)

        rotations = self.learned.rotations + self.random.rotations
        comparisons = self.learned.comparisons
        self.random.insert(key, value, self._random_priority())
        self.learned.insert(surrogate, value, learned_priority)
        self.learned.find(surrogate).partner = self.random.find(key)
        if self.key_map is not None:
            self.key_map[key] = surrogate
        self.comparisons += self.learned.comparisons - comparisons
        self.rotations += (
            self.learned.rotations + self.random.rotations - rotations
        )

    def delete(self, key: int) -> int:
        """Remove `key` from both trees and the map; returns its payload."""
        if key not in self.random:
            raise KeyNotFoundError(key)
        surrogate = self.surrogate(key)
        rotations = self.learned.rotations + self.random.rotations
        comparisons = self.learned.comparisons
        self.learned.find(surrogate).partner = None
        self.learned.delete(surrogate)
        value = self.random.delete(key)
        if self.key_map is not None:
            del self.key_map[key]
        self.comparisons += self.learned.comparisons - comparisons
        self.rotations += (
            self.learned.rotations + self.random.rotations - rotations
        )
        return value

    # --- Queries ---

    def access(self, key: int) -> AccessResult:
        self.ops += 1
        node, visits = self._learned_node(key)
        if node is None:
            return AccessResult(False, visits, None)
        self.overhead_ops += 1
        return AccessResult(True, visits, node.partner.value)

    def _partner_of(self, key: int) -> TreapNode:
        self.ops += 1
        node, _ = self._learned_node(key)
        if node is None:
            raise KeyNotFoundError(key)
        self.overhead_ops += 2
        return node.partner

    def successor(self, key: int) -> Optional[int]:
        partner = self._partner_of(key)
        return partner.succ.key if partner.succ is not None else None

    def predecessor(self, key: int) -> Optional[int]:
        partner = self._partner_of(key)
        return partner.pred.key if partner.pred is not None else None

    def range_count(self, lo: int, hi: int) -> int:
        before = self.random.comparisons
        result = self.random.range_count(lo, hi)
        self.comparisons += self.random.comparisons - before
        self.ops += 1
        return result

    def range_sum(self, lo: int, hi: int) -> int:
        before = self.random.comparisons
        result = self.random.range_sum(lo, hi)
        self.comparisons += self.random.comparisons - before
        self.ops += 1
        return result

    # --- Diagnostics ---

    def depth_of(self, key: int) -> int:
        """One-based depth of `key`'s surrogate in the learned treap."""
        if key not in self.random:
            raise KeyNotFoundError(key)
        return self.learned.depth_of(self.hash_fn.raw(key))

    def validate(self) -> None:
        self.learned.validate()
        self.random.validate()
        if self.learned.count != self.random.count:
            raise InvariantViolation(
                "element-set",
                None,
                f"learned={self.learned.count}, random={self.random.count}",
            )
        partners = set()
        for surrogate in self.learned.keys():
            node = self.learned.find(surrogate)
            partner = node.partner
            if partner is None or self.random.find(partner.key) is not partner:
                raise InvariantViolation("cross-pointer", surrogate)
            if self.hash_fn.raw(partner.key) != surrogate:
                raise InvariantViolation("cross-pointer", partner.key)
            partners.add(id(partner))
        if len(partners) != self.random.count:
            raise InvariantViolation("cross-pointer", None, "not a bijection")
        if self.key_map is not None and set(self.key_map) != set(
            self.random.keys()
        ):
            raise InvariantViolation("key-map", None)
