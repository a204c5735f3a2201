"""
Red-black tree (insert + search only) with comparison counting.

Standard insertion fix-up with parent links; the tree is used as a static
baseline after the keys are inserted in a seeded random order.
"""

import logging
from enum import Enum
from typing import List, Optional

from src.trees.base import (
    AccessResult,
    CountingTree,
    DuplicateKeyError,
    InvariantViolation,
)

logger = logging.getLogger(__name__)


class Colour(Enum):
    BLACK = 0
    RED = 1


class RBNode:
    __slots__ = ("key", "value", "left", "right", "parent", "colour")

    def __init__(self, key: int, value: int = 1):
        self.key = key
        self.value = value
        self.left: Optional[RBNode] = None
        self.right: Optional[RBNode] = None
        self.parent: Optional[RBNode] = None
        self.colour = Colour.RED


def _is_red(node: Optional[RBNode]) -> bool:
    return node is not None and node.colour is Colour.RED


class RedBlackTree(CountingTree):
    name = "red_black"

    def __init__(self):
        super().__init__()
        self.root: Optional[RBNode] = None
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def _rotate_left(self, node: RBNode) -> None:
        pivot = node.right
        node.right = pivot.left
        if pivot.left is not None:
            pivot.left.parent = node
        self._transplant(node, pivot)
        pivot.left = node
        node.parent = pivot
        self.rotations += 1

    def _rotate_right(self, node: RBNode) -> None:
        pivot = node.left
        node.left = pivot.right
        if pivot.right is not None:
            pivot.right.parent = node
        self._transplant(node, pivot)
        pivot.right = node
        node.parent = pivot
        self.rotations += 1

    def _transplant(self, old: RBNode, new: RBNode) -> None:
        parent = old.parent
        new.parent = parent
        if parent is None:
            self.root = new
        elif parent.left is old:
            parent.left = new
        else:
            parent.right = new

    def insert(self, key: int, value: int = 1) -> None:
        """
        Insert `key` and rebalance.

        Raises:
            DuplicateKeyError: if the key is present (tree untouched).
        """
        parent = None
        node = self.root
        visits = 0
        while node is not None:
            visits += 1
            if key == node.key:
                raise DuplicateKeyError(key)
            parent = node
            node = node.left if key < node.key else node.right

        fresh = RBNode(key, value)
        fresh.parent = parent
        if parent is None:
            self.root = fresh
        elif key < parent.key:
            parent.left = fresh
        else:
            parent.right = fresh
        self.comparisons += visits
        self.count += 1
        self._fix_insert(fresh)

    def _fix_insert(self, node: RBNode) -> None:
        while _is_red(node.parent):
            parent = node.parent
            grand = parent.parent
            if parent is grand.left:
                uncle = grand.right
                if _is_red(uncle):
                    parent.colour = uncle.colour = Colour.BLACK
                    grand.colour = Colour.RED
                    node = grand
                    continue
                if node is parent.right:
                    node = parent
                    self._rotate_left(node)
                    parent = node.parent
                parent.colour = Colour.BLACK
                grand.colour = Colour.RED
                self._rotate_right(grand)
            else:
                uncle = grand.left
                if _is_red(uncle):
                    parent.colour = uncle.colour = Colour.BLACK
                    grand.colour = Colour.RED
                    node = grand
                    continue
                if node is parent.left:
                    node = parent
                    self._rotate_right(node)
                    parent = node.parent
                parent.colour = Colour.BLACK
                grand.colour = Colour.RED
                self._rotate_left(grand)
        self.root.colour = Colour.BLACK

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

    def height(self) -> int:
        best = 0
        stack = [(self.root, 1)] if self.root is not None else []
        while stack:
            node, depth = stack.pop()
            best = max(best, depth)
            for child in (node.left, node.right):
                if child is not None:
                    stack.append((child, depth + 1))
        return best

    def keys(self) -> List[int]:
        out: List[int] = []
        stack: List[RBNode] = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            out.append(node.key)
            node = node.right
        return out

    def validate(self) -> int:
        """
        Check BST order, the red rule and equal black height.

        Returns:
            int: the black height (counting nil leaves as 1).
        """
        keys = self.keys()
        for previous, key in zip(keys, keys[1:]):
            if not previous < key:
                raise InvariantViolation("bst-order", key)
        if _is_red(self.root):
            raise InvariantViolation("root-black", self.root.key)

        black_height = None
        stack = [(self.root, 0)]
        while stack:
            node, blacks = stack.pop()
            if node is None:
                if black_height is None:
                    black_height = blacks + 1
                elif black_height != blacks + 1:
                    raise InvariantViolation("black-height", None)
                continue
            if _is_red(node) and (_is_red(node.left) or _is_red(node.right)):
                raise InvariantViolation("red-red", node.key)
            for child in (node.left, node.right):
                if child is not None and child.parent is not node:
                    raise InvariantViolation("parent-link", child.key)
            blacks += 0 if _is_red(node) else 1
            stack.append((node.left, blacks))
            stack.append((node.right, blacks))
        if len(keys) != self.count:
            raise InvariantViolation("count", None)
        return black_height
