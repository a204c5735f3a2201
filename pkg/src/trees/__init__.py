from .base import (  # noqa: F401
    AccessResult,
    CountingTree,
    DuplicateKeyError,
    InvalidRangeError,
    InvariantViolation,
    KeyNotFoundError,
    Priority,
    RankOutOfRangeError,
    TreeError,
)
from .red_black import RedBlackTree  # noqa: F401
from .splay import SplayTree  # noqa: F401
from .treap import Treap, TreapNode  # noqa: F401
