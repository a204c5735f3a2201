import random

import numpy as np
import pytest

from src.hashing import FourWiseHash, HashCollisionError
from src.shuffled_treap import ShuffledTreap
from src.trees import (
    DuplicateKeyError,
    InvariantViolation,
    KeyNotFoundError,
    Priority,
    Treap,
)
from tests.testing_utils import random_priorities


def _learned(n):
    # Rank i key is the integer i: the adversarial sorted layout.
    return {i: Priority(float(n - i), 0.0) for i in range(1, n + 1)}


@pytest.fixture()
def shuffled():
    tree = ShuffledTreap(FourWiseHash.from_seed(7), seed=1)
    for key, priority in _learned(64).items():
        tree.insert(key, key * 3, priority)
    tree.reset_counters()
    return tree


def test_insert_links_both_trees(shuffled):
    assert len(shuffled) == 64
    assert shuffled.learned.count == shuffled.random.count == 64
    shuffled.validate()


def test_access_returns_partner_value(shuffled):
    result = shuffled.access(10)
    assert result.found and result.value == 30
    assert result.comparisons == shuffled.learned.depth_of(
        shuffled.hash_fn.raw(10)
    )
    # map lookup + partner hop
    assert shuffled.overhead_ops == 2
    assert shuffled.comparisons == result.comparisons
    assert shuffled.ops == 1


def test_access_missing_key(shuffled):
    result = shuffled.access(1000)
    assert not result.found
    assert result.comparisons == 0
    assert shuffled.overhead_ops == 1


def test_most_frequent_key_is_learned_root(shuffled):
    assert shuffled.depth_of(1) == 1
    assert shuffled.access(1).comparisons == 1


def test_successor_and_predecessor_follow_identity_order(shuffled):
    assert shuffled.successor(10) == 11
    assert shuffled.predecessor(10) == 9
    assert shuffled.successor(64) is None
    assert shuffled.predecessor(1) is None
    with pytest.raises(KeyNotFoundError):
        shuffled.successor(500)


def test_range_queries_use_identity_order(shuffled):
    assert shuffled.range_count(5, 9) == 5
    assert shuffled.range_sum(5, 9) == 3 * (5 + 6 + 7 + 8 + 9)
    assert shuffled.comparisons > 0


def test_delete_removes_from_both(shuffled):
    assert shuffled.delete(20) == 60
    assert 20 not in shuffled
    assert 20 not in shuffled.key_map
    assert not shuffled.access(20).found
    assert shuffled.successor(19) == 21
    shuffled.validate()
    with pytest.raises(KeyNotFoundError):
        shuffled.delete(20)


def test_duplicate_insert(shuffled):
    with pytest.raises(DuplicateKeyError):
        shuffled.insert(5, 1, Priority(1.0, 0.0))


def test_collision_leaves_structure_unchanged():
    # x^3 mod 5 maps 1 and 6 to the same value.
    tree = ShuffledTreap(FourWiseHash((0, 0, 0, 1), prime=5), seed=0)
    tree.insert(1, 1, Priority(1.0, 0.0))
    with pytest.raises(HashCollisionError) as info:
        tree.insert(6, 1, Priority(2.0, 0.0))
    assert (info.value.key, info.value.other) == (6, 1)
    assert len(tree) == 1
    assert 6 not in tree
    tree.validate()


def test_hash_only_mode_matches_map_mode():
    h = FourWiseHash.from_seed(3)
    with_map = ShuffledTreap(h, seed=2)
    no_map = ShuffledTreap(h, seed=2, store_map=False)
    for key, priority in _learned(40).items():
        with_map.insert(key, key, priority)
        no_map.insert(key, key, priority)
    assert no_map.key_map is None
    for key in range(1, 45):
        a, b = with_map.access(key), no_map.access(key)
        assert a.found == b.found and a.value == b.value
    no_map.validate()


def test_insert_requires_learned_priority():
    tree = ShuffledTreap(FourWiseHash.from_seed(0))
    with pytest.raises(TypeError):
        tree.insert(1)


def test_validate_detects_broken_partner(shuffled):
    node = shuffled.learned.root
    node.partner = shuffled.random.find(node.partner.key % 64 + 1)
    with pytest.raises(InvariantViolation) as info:
        shuffled.validate()
    assert info.value.invariant == "cross-pointer"


def test_reset_counters_covers_components(shuffled):
    shuffled.access(3)
    shuffled.range_count(1, 3)
    shuffled.reset_counters()
    assert shuffled.counters()["comparisons"] == 0
    assert shuffled.learned.comparisons == 0
    assert shuffled.random.comparisons == 0


def test_shuffled_beats_plain_on_sorted_ranks():
    n = 256
    probabilities = 1.0 / np.arange(1, n + 1)
    probabilities /= probabilities.sum()
    learned = _learned(n)
    plain = Treap.build((k, 1, p) for k, p in learned.items())
    plain_cost = sum(
        probabilities[k - 1] * plain.depth_of(k) for k in learned
    )
    shuffled_costs = []
    for seed in range(10):
        tree = ShuffledTreap(FourWiseHash.from_seed(seed), seed=seed)
        for key, priority in learned.items():
            tree.insert(key, 1, priority)
        shuffled_costs.append(
            sum(probabilities[k - 1] * tree.depth_of(k) for k in learned)
        )
    assert np.mean(shuffled_costs) < plain_cost


def test_adjacent_identities_stay_adjacent_in_random_treap():
    keys = list(range(1, 65))
    tree = ShuffledTreap(FourWiseHash.from_seed(11), seed=4)
    for key, priority in random_priorities(keys, seed=6).items():
        tree.insert(key, 1, priority)
    random_keys = list(tree.random.keys())
    assert random_keys == keys
    for key in keys[:-1]:
        assert tree.successor(key) == key + 1


@pytest.mark.parametrize("seed", range(30))
def test_ancestors_are_adjacent_among_earlier_surrogates(seed):
    n = 64
    tree = ShuffledTreap(FourWiseHash.from_seed(seed), seed=seed)
    for key, priority in _learned(n).items():
        tree.insert(key, 1, priority)
    surrogate = {key: tree.hash_fn.raw(key) for key in range(1, n + 1)}
    rank = {s: key for key, s in surrogate.items()}

    for i in range(1, n + 1):
        s_i = surrogate[i]
        for s_j in tree.learned.path_keys(s_i)[:-1]:
            j = rank[s_j]
            assert j < i
            earlier = sorted([surrogate[k] for k in range(1, j + 1)] + [s_i])
            assert abs(earlier.index(s_i) - earlier.index(s_j)) == 1


@pytest.mark.parametrize("store_map", [True, False])
def test_components_stay_valid_under_mutation_fuzz(store_map):
    rng = random.Random(31)
    tree = ShuffledTreap(
        FourWiseHash.from_seed(5), seed=6, store_map=store_map
    )
    values = {}
    for _ in range(2000):
        key = rng.randint(0, 200)
        if key not in values:
            values[key] = rng.randint(1, 9)
            priority = Priority(rng.random(), rng.random())
            tree.insert(key, values[key], priority)
            tree.validate()
        elif rng.random() < 0.4:
            assert tree.delete(key) == values.pop(key)
            tree.validate()
        else:
            assert tree.access(key).value == values[key]
    assert list(tree.random.keys()) == sorted(values)


def test_delete_then_reinsert_in_hash_only_mode():
    tree = ShuffledTreap(FourWiseHash.from_seed(9), seed=3, store_map=False)
    for key, priority in _learned(32).items():
        tree.insert(key, key, priority)
    tree.delete(7)
    tree.validate()
    assert not tree.access(7).found

    tree.insert(7, 70, Priority(100.0, 0.0))
    tree.validate()
    assert tree.access(7).value == 70
    assert tree.depth_of(7) == 1
    assert tree.successor(6) == 7
