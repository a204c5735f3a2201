"""Property-based structural checks for the treap and the baselines."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from src.trees import Priority, RedBlackTree, SplayTree, Treap
from tests.testing_utils import brute_range, random_priorities

key_sets = st.sets(st.integers(0, 10_000), min_size=1, max_size=60)


@settings(max_examples=200, deadline=None)
@given(keys=key_sets, seed=st.integers(0, 2**32 - 1))
def test_shape_depends_only_on_key_priority_set(keys, seed):
    keys = sorted(keys)
    priorities = random_priorities(keys, seed)
    reference = Treap.build((k, 1, priorities[k]) for k in keys)

    order = list(keys)
    random.Random(seed).shuffle(order)
    treap = Treap()
    for k in order:
        treap.insert(k, 1, priorities[k])

    assert treap.shape_signature() == reference.shape_signature()
    treap.validate()


@settings(max_examples=200, deadline=None)
@given(
    keys=key_sets,
    extra=st.sets(st.integers(10_001, 20_000), max_size=20),
    seed=st.integers(0, 2**32 - 1),
)
def test_interleaved_deletes_leave_same_shape(keys, extra, seed):
    priorities = random_priorities(sorted(keys | extra), seed)
    ops = [("insert", k) for k in keys | extra]
    random.Random(seed).shuffle(ops)
    treap = Treap()
    for _, k in ops:
        treap.insert(k, 1, priorities[k])
        if k in extra:
            treap.delete(k)

    reference = Treap.build((k, 1, priorities[k]) for k in keys)
    assert treap.shape_signature() == reference.shape_signature()
    treap.validate()


@settings(max_examples=200, deadline=None)
@given(
    keys=st.sets(st.integers(0, 10_000), min_size=2, max_size=60),
    data=st.data(),
)
def test_delete_equals_rebuild_without_key(keys, data):
    keys = sorted(keys)
    victim = data.draw(st.sampled_from(keys))
    priorities = random_priorities(keys, seed=len(keys))
    treap = Treap.build((k, k, priorities[k]) for k in keys)

    assert treap.delete(victim) == victim
    rebuilt = Treap.build((k, k, priorities[k]) for k in keys if k != victim)
    assert treap.shape_signature() == rebuilt.shape_signature()
    treap.validate()


def test_order_statistics_match_brute_force():
    rng = random.Random(2024)
    keys = rng.sample(range(100_000), 500)
    pairs = sorted((k, rng.randint(1, 100)) for k in keys)
    priorities = random_priorities(keys, seed=5)
    treap = Treap.build((k, v, priorities[k]) for k, v in pairs)
    sorted_keys = [k for k, _ in pairs]

    for _ in range(1000):
        lo, hi = sorted(rng.randint(-10, 100_010) for _ in range(2))
        count, total = brute_range(pairs, lo, hi)
        assert treap.range_count(lo, hi) == count
        assert treap.range_sum(lo, hi) == total

        k = rng.randint(1, len(sorted_keys))
        assert treap.kth(k) == sorted_keys[k - 1]
        key = rng.choice(sorted_keys)
        assert treap.rank_of(key) == sorted_keys.index(key) + 1


def test_successor_threads_match_sorted_order():
    keys = random.Random(7).sample(range(5000), 300)
    priorities = random_priorities(keys, seed=8)
    treap = Treap.build((k, 1, priorities[k]) for k in keys)
    ordered = sorted(keys)
    for previous, key in zip(ordered, ordered[1:]):
        assert treap.successor(previous) == key
        assert treap.predecessor(key) == previous


def test_red_black_invariants_under_fuzz():
    rng = random.Random(99)
    tree = RedBlackTree()
    present = set()
    for step in range(10_000):
        key = rng.randint(0, 20_000)
        if key in present:
            assert tree.access(key).found
        else:
            tree.insert(key)
            present.add(key)
        if step % 500 == 0:
            tree.validate()
    black_height = tree.validate()
    assert tree.keys() == sorted(present)
    # Height is at most twice the black height.
    assert tree.height() <= 2 * black_height


def test_splay_access_moves_key_to_root_under_fuzz():
    rng = random.Random(100)
    tree = SplayTree()
    present = set()
    inserted = []
    for _ in range(10_000):
        key = rng.randint(0, 5_000)
        if key in present or (inserted and rng.random() < 0.5):
            target = key if key in present else rng.choice(inserted)
            assert tree.access(target).found
            assert tree.root.key == target
        else:
            tree.insert(key)
            present.add(key)
            inserted.append(key)
            assert tree.root.key == key
    tree.validate()
    assert tree.keys() == sorted(present)


@settings(max_examples=50, deadline=None)
@given(keys=st.lists(st.integers(-1000, 1000), min_size=1, unique=True))
def test_all_trees_agree_on_membership(keys):
    priorities = random_priorities(keys)
    treap = Treap.build((k, 1, priorities[k]) for k in keys)
    splay, red_black = SplayTree(), RedBlackTree()
    for k in keys:
        splay.insert(k)
        red_black.insert(k)
    for key in range(-1005, 1005, 7):
        expected = key in keys
        assert treap.access(key).found is expected
        assert splay.access(key).found is expected
        assert red_black.access(key).found is expected


def test_priority_orders_lexicographically():
    assert Priority(2.0, 0.0) > Priority(1.0, 0.99)
    assert Priority(1.0, 0.5) > Priority(1.0, 0.4)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), data=st.data())
def test_update_priority_equals_rebuild(seed, data):
    keys = list(range(1, 51))
    priorities = random_priorities(keys, seed)
    treap = Treap.build((k, 1, priorities[k]) for k in keys)

    key = data.draw(st.sampled_from(keys))
    rng = random.Random(seed + 1)
    priorities[key] = Priority(rng.random(), rng.random())
    treap.update_priority(key, priorities[key])

    rebuilt = Treap.build((k, 1, priorities[k]) for k in keys)
    assert treap.shape_signature() == rebuilt.shape_signature()
    treap.validate()


def test_treap_invariants_under_mixed_fuzz():
    rng = random.Random(4242)
    treap = Treap()
    priorities = {}
    values = {}
    for step in range(1, 10_001):
        key = rng.randint(0, 400)
        roll = rng.random()
        if key not in priorities:
            priorities[key] = Priority(rng.random(), rng.random())
            values[key] = rng.randint(1, 9)
            treap.insert(key, values[key], priorities[key])
        elif roll < 0.3:
            assert treap.delete(key) == values.pop(key)
            del priorities[key]
        elif roll < 0.6:
            priorities[key] = Priority(rng.random(), rng.random())
            treap.update_priority(key, priorities[key])
        else:
            assert treap.access(key).value == values[key]
        treap.validate()

        if step % 250 == 0:
            rebuilt = Treap.build(
                (k, values[k], p) for k, p in priorities.items()
            )
            assert treap.shape_signature() == rebuilt.shape_signature()
            assert list(treap.keys()) == sorted(priorities)
