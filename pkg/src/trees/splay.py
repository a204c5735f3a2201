"""
Bottom-up splay tree with comparison and rotation counters.

Splaying runs along the recorded search path (zig / zig-zig / zig-zag), so
nodes carry no parent links. Rotations are tallied separately from
comparisons because they are the splay tree's extra runtime cost.
"""

import logging
from typing import List, Optional

from src.trees.base import (
    AccessResult,
    CountingTree,
    DuplicateKeyError,
    InvariantViolation,
)

logger = logging.getLogger(__name__)


class SplayNode:
    __slots__ = ("key", "value", "left", "right")

    def __init__(self, key: int, value: int = 1):
        self.key = key
        self.value = value
        self.left: Optional[SplayNode] = None
        self.right: Optional[SplayNode] = None


class SplayTree(CountingTree):
    name = "splay"

    def __init__(self):
        super().__init__()
        self.root: Optional[SplayNode] = None
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def _rotate_up(
        self,
        child: SplayNode,
        parent: SplayNode,
        grand: Optional[SplayNode],
    ) -> None:
        """Rotate `child` above `parent`, hanging it where parent was."""
        if parent.left is child:
            parent.left = child.right
            child.right = parent
        else:
            parent.right = child.left
            child.left = parent
        if grand is None:
            self.root = child
        elif grand.left is parent:
            grand.left = child
        else:
            grand.right = child
        self.rotations += 1

    def _splay(self, path: List[SplayNode]) -> None:
        node = path.pop()
        while path:
            parent = path.pop()
            if not path:
                self._rotate_up(node, parent, None)
                break
            grand = path.pop()
            great = path[-1] if path else None
            if (grand.left is parent) == (parent.left is node):
                # zig-zig
                self._rotate_up(parent, grand, great)
                self._rotate_up(node, parent, great)
            else:
                # zig-zag
                self._rotate_up(node, parent, grand)
                self._rotate_up(node, grand, great)
        self.root = node

    def _search_path(self, key: int) -> List[SplayNode]:
        path: List[SplayNode] = []
        node = self.root
        while node is not None:
            path.append(node)
            if key == node.key:
                break
            node = node.left if key < node.key else node.right
        return path

    def access(self, key: int) -> AccessResult:
        """
        Search for `key` and splay the last visited node to the root.

        On a miss the last node on the search path is splayed, as in the
        standard algorithm.
        """
        path = self._search_path(key)
        visits = len(path)
        self.comparisons += visits
        self.ops += 1
        if not path:
            return AccessResult(False, 0, None)
        last = path[-1]
        self._splay(path)
        if last.key == key:
            return AccessResult(True, visits, last.value)
        return AccessResult(False, visits, None)

    def insert(self, key: int, value: int = 1) -> None:
        """
        Attach `key` as a leaf and splay it to the root.

        Raises:
            DuplicateKeyError: if the key is present (no restructuring).
        """
        path = self._search_path(key)
        if path and path[-1].key == key:
            raise DuplicateKeyError(key)
        self.comparisons += len(path)
        node = SplayNode(key, value)
        if path:
            parent = path[-1]
            if key < parent.key:
                parent.left = node
            else:
                parent.right = node
        path.append(node)
        self.count += 1
        self._splay(path)

    def depth_of(self, key: int) -> Optional[int]:
        path = self._search_path(key)
        if path and path[-1].key == key:
            return len(path)
        return None

    def keys(self) -> List[int]:
        out: List[int] = []
        stack: List[SplayNode] = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            out.append(node.key)
            node = node.right
        return out

    def validate(self) -> None:
        keys = self.keys()
        for previous, key in zip(keys, keys[1:]):
            if not previous < key:
                raise InvariantViolation("bst-order", key)
        if len(keys) != self.count:
            raise InvariantViolation(
                "count", None, f"count={self.count}, nodes={len(keys)}"
            )
