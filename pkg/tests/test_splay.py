import pytest

from src.trees import DuplicateKeyError, SplayTree


def _tree(keys):
    tree = SplayTree()
    for key in keys:
        tree.insert(key, key * 2)
    tree.reset_counters()
    return tree


def test_insert_splays_new_key_to_root():
    tree = SplayTree()
    for key in (5, 3, 8):
        tree.insert(key)
        assert tree.root.key == key
    assert len(tree) == 3
    tree.validate()


def test_insert_duplicate_raises_without_restructuring():
    tree = _tree([1, 2, 3])
    root = tree.root
    with pytest.raises(DuplicateKeyError):
        tree.insert(1)
    assert tree.root is root
    assert tree.rotations == 0


def test_zig_zig_access():
    # Increasing inserts leave a left path 3 -> 2 -> 1.
    tree = _tree([1, 2, 3])
    assert tree.depth_of(1) == 3
    result = tree.access(1)
    assert result.found and result.value == 2
    assert result.comparisons == 3
    assert tree.root.key == 1
    assert tree.rotations == 2
    # zig-zig rotates the grandparent first: 1 -> 2 -> 3 down the right.
    assert tree.depth_of(2) == 2
    assert tree.depth_of(3) == 3


def test_zig_zag_insert():
    tree = SplayTree()
    tree.insert(1)
    tree.insert(3)  # 3 at the root, 1 as its left child
    tree.reset_counters()
    tree.insert(2)
    assert tree.root.key == 2
    assert tree.depth_of(1) == 2 and tree.depth_of(3) == 2
    assert tree.rotations == 2
    assert tree.comparisons == 2
    tree.validate()


def test_repeated_access_costs_one():
    tree = _tree(range(1, 50))
    tree.access(17)
    tree.reset_counters()
    for _ in range(5):
        assert tree.access(17).comparisons == 1
    assert tree.comparisons == 5


def test_miss_splays_last_visited_node():
    tree = _tree([10, 20, 30])
    result = tree.access(25)
    assert not result.found
    assert tree.root.key in (20, 30)
    assert tree.ops == 1


def test_empty_tree_access():
    tree = SplayTree()
    result = tree.access(1)
    assert not result.found and result.comparisons == 0
    assert tree.depth_of(1) is None
