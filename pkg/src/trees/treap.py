"""
Rotation-based treap with order-statistic/range augmentation and in-order
successor/predecessor threading.

Priorities are arbitrary `Priority` pairs, so the same structure serves as a
learned treap (priorities from a frequency oracle) and as a classic random
treap (i.i.d. priorities). Parent links are not stored: every mutation
records its root-to-node path and rotates along it.

Depth convention: depth == comparisons == nodes on the search path, so the
root has depth 1.
"""

import logging
from typing import Iterable, Iterator, List, Optional, Tuple

from src.trees.base import (
    AccessResult,
    CountingTree,
    DuplicateKeyError,
    InvalidRangeError,
    InvariantViolation,
    KeyNotFoundError,
    Priority,
    RankOutOfRangeError,
)

logger = logging.getLogger(__name__)


class TreapNode:
    __slots__ = (
        "key",
        "priority",
        "value",
        "left",
        "right",
        "subtree_size",
        "subtree_sum",
        "succ",
        "pred",
        "partner",
    )

    def __init__(self, key: int, priority: Priority, value: int = 1):
        self.key = key
        self.priority = priority
        self.value = value
        self.left: Optional[TreapNode] = None
        self.right: Optional[TreapNode] = None
        self.subtree_size = 1
        self.subtree_sum = value
        self.succ: Optional[TreapNode] = None
        self.pred: Optional[TreapNode] = None
        # Cross link used by the shuffled (dual) structure.
        self.partner: Optional[TreapNode] = None

    def __repr__(self) -> str:
        return (
            f"TreapNode(key={self.key}, priority={self.priority}, "
            f"size={self.subtree_size})"
        )


def _size(node: Optional[TreapNode]) -> int:
    return node.subtree_size if node is not None else 0


def _sum(node: Optional[TreapNode]) -> int:
    return node.subtree_sum if node is not None else 0


def _pull(node: TreapNode) -> None:
    left, right = node.left, node.right
    node.subtree_size = 1 + _size(left) + _size(right)
    node.subtree_sum = node.value + _sum(left) + _sum(right)


class Treap(CountingTree):
    """
    Heap-ordered binary search tree with exact comparison accounting.

    Instances are single-owner: nothing here is safe for concurrent
    mutation, but a treap may be handed to another thread or process.
    """

    name = "treap"

    def __init__(self):
        super().__init__()
        self.root: Optional[TreapNode] = None
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def __contains__(self, key: int) -> bool:
        node, _ = self._locate(key)
        return node is not None

    # --- Construction ---

    @classmethod
    def build(cls, items: Iterable[Tuple[int, int, Priority]]) -> "Treap":
        """
        Build a treap from (key, value, priority) triples in one pass.

        Uses the sorted-key stack construction, so the result has exactly
        the shape repeated `insert` calls would produce, with all counters
        left at zero.

        Raises:
            DuplicateKeyError: if a key appears twice.
        """
        nodes = [
            TreapNode(key, Priority(*priority), value)
            for key, value, priority in items
        ]
        nodes.sort(key=lambda node: node.key)
        treap = cls()
        stack: List[TreapNode] = []
        previous: Optional[TreapNode] = None
        for node in nodes:
            if previous is not None:
                if previous.key == node.key:
                    raise DuplicateKeyError(node.key)
                previous.succ = node
                node.pred = previous
            previous = node

            last = None
            while stack and stack[-1].priority < node.priority:
                last = stack.pop()
            node.left = last
            if stack:
                stack[-1].right = node
            stack.append(node)

        if stack:
            treap.root = stack[0]
            for node in reversed(treap._preorder()):
                _pull(node)
        treap.count = len(nodes)
        logger.debug("Built treap with %d nodes", treap.count)
        return treap

    # --- Internal helpers ---

    def _locate(
        self, key: int
    ) -> Tuple[Optional[TreapNode], List[TreapNode]]:
        """Return (node or None, nodes visited from the root, inclusive)."""
        path: List[TreapNode] = []
        node = self.root
        while node is not None:
            path.append(node)
            if key == node.key:
                return node, path
            node = node.left if key < node.key else node.right
        return None, path

    def _replace_child(
        self,
        parent: Optional[TreapNode],
        old: TreapNode,
        new: Optional[TreapNode],
    ) -> None:
        if parent is None:
            self.root = new
        elif parent.left is old:
            parent.left = new
        else:
            parent.right = new

    def _rotate_right(self, node: TreapNode) -> TreapNode:
        pivot = node.left
        node.left = pivot.right
        pivot.right = node
        _pull(node)
        _pull(pivot)
        self.rotations += 1
        return pivot

    def _rotate_left(self, node: TreapNode) -> TreapNode:
        pivot = node.right
        node.right = pivot.left
        pivot.left = node
        _pull(node)
        _pull(pivot)
        self.rotations += 1
        return pivot

    def _sift_up(self, node: TreapNode, ancestors: List[TreapNode]) -> None:
        # ancestors: root-first path down to node's parent.
        while ancestors and ancestors[-1].priority < node.priority:
            parent = ancestors.pop()
            grand = ancestors[-1] if ancestors else None
            if parent.left is node:
                lifted = self._rotate_right(parent)
            else:
                lifted = self._rotate_left(parent)
            self._replace_child(grand, parent, lifted)

    def _sift_down(
        self, node: TreapNode, ancestors: List[TreapNode], to_leaf: bool
    ) -> List[TreapNode]:
        """
        Rotate `node` downwards, always lifting its higher-priority child.

        Stops when node is a leaf (`to_leaf`) or when heap order holds.
        Returns the updated root-first ancestor list of `node`.
        """
        while True:
            left, right = node.left, node.right
            if left is None and right is None:
                break
            if left is None:
                child = right
            elif right is None:
                child = left
            else:
                child = left if left.priority > right.priority else right
            if not to_leaf and child.priority <= node.priority:
                break
            parent = ancestors[-1] if ancestors else None
            if child is left:
                lifted = self._rotate_right(node)
            else:
                lifted = self._rotate_left(node)
            self._replace_child(parent, node, lifted)
            ancestors.append(lifted)
        return ancestors

    def _insert_node(
        self, key: int, value: int, priority: Priority
    ) -> TreapNode:
        found, path = self._locate(key)
        if found is not None:
            raise DuplicateKeyError(key)

        node = TreapNode(key, Priority(*priority), value)
        pred = succ = None
        for ancestor in path:
            if key < ancestor.key:
                succ = ancestor
            else:
                pred = ancestor
        node.pred, node.succ = pred, succ
        if pred is not None:
            pred.succ = node
        if succ is not None:
            succ.pred = node

        if path:
            parent = path[-1]
            if key < parent.key:
                parent.left = node
            else:
                parent.right = node
        else:
            self.root = node
        for ancestor in path:
            ancestor.subtree_size += 1
            ancestor.subtree_sum += value

        self.comparisons += len(path)
        self._sift_up(node, path)
        self.count += 1
        return node

    def _find_counted(self, key: int) -> TreapNode:
        node, path = self._locate(key)
        self.comparisons += len(path)
        self.ops += 1
        if node is None:
            raise KeyNotFoundError(key)
        return node

    def _boundary(self, key: int, inclusive: bool) -> Tuple[int, int]:
        """(count, sum) of keys < key, or <= key when inclusive."""
        node = self.root
        count = total = visits = 0
        while node is not None:
            visits += 1
            if node.key < key or (inclusive and node.key == key):
                count += _size(node.left) + 1
                total += _sum(node.left) + node.value
                node = node.right
            else:
                node = node.left
        self.comparisons += visits
        return count, total

    def _preorder(self) -> List[TreapNode]:
        order: List[TreapNode] = []
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            order.append(node)
            if node.right is not None:
                stack.append(node.right)
            if node.left is not None:
                stack.append(node.left)
        return order

    def _inorder(self) -> List[TreapNode]:
        order: List[TreapNode] = []
        stack: List[TreapNode] = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            order.append(node)
            node = node.right
        return order

    def _leftmost(self) -> Optional[TreapNode]:
        node = self.root
        if node is None:
            return None
        while node.left is not None:
            node = node.left
        return node

    # --- Mutation ---

    def insert(self, key: int, value: int = 1, priority=None) -> None:
        """
        Attach `key` as a leaf and rotate it up until heap order holds.

        Raises:
            DuplicateKeyError: if the key is already present (the treap is
                left untouched).
        """
        if priority is None:
            raise TypeError("insert() requires a priority")
        self._insert_node(key, value, priority)

    def delete(self, key: int) -> int:
        """
        Rotate `key` down to a leaf, detach it and return its payload.

        Raises:
            KeyNotFoundError: if the key is absent (nothing is modified).
        """
        node, path = self._locate(key)
        if node is None:
            raise KeyNotFoundError(key)
        self.comparisons += len(path)
        path.pop()

        ancestors = self._sift_down(node, path, to_leaf=True)
        parent = ancestors[-1] if ancestors else None
        self._replace_child(parent, node, None)
        for ancestor in ancestors:
            ancestor.subtree_size -= 1
            ancestor.subtree_sum -= node.value

        if node.pred is not None:
            node.pred.succ = node.succ
        if node.succ is not None:
            node.succ.pred = node.pred
        node.pred = node.succ = None
        self.count -= 1
        return node.value

    def update_priority(self, key: int, new_priority: Priority) -> None:
        """
        Change a node's priority and restore heap order by rotation.

        Raises:
            KeyNotFoundError: if the key is absent.
        """
        node, path = self._locate(key)
        if node is None:
            raise KeyNotFoundError(key)
        self.comparisons += len(path)
        path.pop()

        new_priority = Priority(*new_priority)
        old_priority = node.priority
        node.priority = new_priority
        if new_priority > old_priority:
            self._sift_up(node, path)
        elif new_priority < old_priority:
            self._sift_down(node, path, to_leaf=False)

    # --- Queries ---

    def find(self, key: int) -> Optional[TreapNode]:
        """Node holding `key`, or None; counters are not touched."""
        node, _ = self._locate(key)
        return node

    def access_node(self, key: int) -> Tuple[Optional[TreapNode], int]:
        """Counted search returning the node itself and the path length."""
        node, path = self._locate(key)
        self.comparisons += len(path)
        self.ops += 1
        return node, len(path)

    def access(self, key: int) -> AccessResult:
        node = self.root
        visits = 0
        while node is not None:
            visits += 1
            node_key = node.key
            if key == node_key:
                break
            node = node.left if key < node_key else node.right
        self.comparisons += visits
        self.ops += 1
        if node is None:
            return AccessResult(False, visits, None)
        return AccessResult(True, visits, node.value)

    def successor(self, key: int) -> Optional[int]:
        """Smallest key greater than `key`, found via the node's thread."""
        node = self._find_counted(key)
        self.overhead_ops += 1
        return node.succ.key if node.succ is not None else None

    def predecessor(self, key: int) -> Optional[int]:
        node = self._find_counted(key)
        self.overhead_ops += 1
        return node.pred.key if node.pred is not None else None

    def range_count(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise InvalidRangeError(lo, hi)
        self.ops += 1
        upper, _ = self._boundary(hi, inclusive=True)
        lower, _ = self._boundary(lo, inclusive=False)
        return upper - lower

    def range_sum(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise InvalidRangeError(lo, hi)
        self.ops += 1
        _, upper = self._boundary(hi, inclusive=True)
        _, lower = self._boundary(lo, inclusive=False)
        return upper - lower

    def kth(self, k: int) -> int:
        """k-th smallest key, one-based."""
        if not 1 <= k <= self.count:
            raise RankOutOfRangeError(k, self.count)
        self.ops += 1
        node = self.root
        while True:
            self.comparisons += 1
            left_size = _size(node.left)
            if k == left_size + 1:
                return node.key
            if k <= left_size:
                node = node.left
            else:
                k -= left_size + 1
                node = node.right

    def rank_of(self, key: int) -> int:
        """One-based rank of `key` among the stored keys."""
        rank = visits = 0
        node = self.root
        while node is not None:
            visits += 1
            if key < node.key:
                node = node.left
            elif key > node.key:
                rank += _size(node.left) + 1
                node = node.right
            else:
                self.comparisons += visits
                self.ops += 1
                return rank + _size(node.left) + 1
        raise KeyNotFoundError(key)

    # --- Diagnostics (never touch counters) ---

    def depth_of(self, key: int) -> int:
        node, path = self._locate(key)
        if node is None:
            raise KeyNotFoundError(key)
        return len(path)

    def path_keys(self, key: int) -> List[int]:
        """Keys on the root-to-`key` path, root first."""
        node, path = self._locate(key)
        if node is None:
            raise KeyNotFoundError(key)
        return [n.key for n in path]

    def height(self) -> int:
        best = 0
        stack = [(self.root, 1)] if self.root is not None else []
        while stack:
            node, depth = stack.pop()
            best = max(best, depth)
            if node.left is not None:
                stack.append((node.left, depth + 1))
            if node.right is not None:
                stack.append((node.right, depth + 1))
        return best

    def keys(self) -> Iterator[int]:
        node = self._leftmost()
        while node is not None:
            yield node.key
            node = node.succ

    def items(self) -> Iterator[Tuple[int, int]]:
        node = self._leftmost()
        while node is not None:
            yield node.key, node.value
            node = node.succ

    def shape_signature(self) -> Tuple[Tuple, ...]:
        """Preorder (key, left, right) key triples; equal iff same shape."""
        return tuple(
            (
                node.key,
                node.left.key if node.left is not None else None,
                node.right.key if node.right is not None else None,
            )
            for node in self._preorder()
        )

    def validate(self) -> None:
        """
        Walk the whole tree and raise InvariantViolation on the first
        broken invariant (bst-order, heap-order, subtree-size, subtree-sum,
        threading, count).
        """
        inorder = self._inorder()
        for previous, node in zip(inorder, inorder[1:]):
            if not previous.key < node.key:
                raise InvariantViolation(
                    "bst-order", node.key, f"follows key {previous.key}"
                )

        for node in reversed(self._preorder()):
            for child in (node.left, node.right):
                if child is not None and child.priority > node.priority:
                    raise InvariantViolation(
                        "heap-order", child.key, f"above parent {node.key}"
                    )
            expected_size = 1 + _size(node.left) + _size(node.right)
            if node.subtree_size != expected_size:
                raise InvariantViolation(
                    "subtree-size",
                    node.key,
                    f"stored {node.subtree_size}, expected {expected_size}",
                )
            expected_sum = node.value + _sum(node.left) + _sum(node.right)
            if node.subtree_sum != expected_sum:
                raise InvariantViolation(
                    "subtree-sum",
                    node.key,
                    f"stored {node.subtree_sum}, expected {expected_sum}",
                )

        for index, node in enumerate(inorder):
            want_pred = inorder[index - 1] if index > 0 else None
            want_succ = (
                inorder[index + 1] if index + 1 < len(inorder) else None
            )
            if node.pred is not want_pred or node.succ is not want_succ:
                raise InvariantViolation("threading", node.key)

        if self.count != len(inorder) or self.count != _size(self.root):
            raise InvariantViolation(
                "count",
                self.root.key if self.root is not None else None,
                f"count={self.count}, nodes={len(inorder)}",
            )
