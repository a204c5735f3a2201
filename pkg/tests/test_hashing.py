import pytest

from src.hashing import (
    MERSENNE_61,
    FourWiseHash,
    hash_eval,
    independence_counts,
    is_four_wise_independent,
)


def test_polynomial_evaluation():
    h = FourWiseHash((1, 2, 3, 4), prime=101)
    # 4x^3 + 3x^2 + 2x + 1 at x = 2 is 49.
    assert h.raw(2) == 49
    assert h(2) == pytest.approx(49 / 101)
    assert hash_eval(h, 2) == h(2)


def test_inputs_reduced_mod_prime():
    h = FourWiseHash((5, 7, 11, 13), prime=17)
    assert h.raw(3) == h.raw(3 + 17)


def test_large_field_has_no_overflow():
    h = FourWiseHash((MERSENNE_61 - 1,) * 4)
    value = h.raw(MERSENNE_61 - 2)
    assert 0 <= value < MERSENNE_61
    assert 0.0 <= h(12345) < 1.0


def test_from_seed_is_deterministic():
    a = FourWiseHash.from_seed(42)
    b = FourWiseHash.from_seed(42)
    c = FourWiseHash.from_seed(43)
    assert a.coefficients == b.coefficients
    assert a.coefficients != c.coefficients
    assert all(0 <= x < MERSENNE_61 for x in a.coefficients)


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        FourWiseHash((1, 2, 3), prime=7)
    with pytest.raises(ValueError):
        FourWiseHash((1, 2, 3, 4), prime=1)


def test_toy_field_is_four_wise_independent():
    # 5**4 = 625 coefficient tuples, each output tuple exactly once.
    counts = independence_counts(5, [0, 1, 2, 3])
    assert sum(counts.values()) == 625
    assert len(counts) == 625
    assert is_four_wise_independent(5, [0, 1, 2, 3])
    assert is_four_wise_independent(5, [1, 2, 3, 4])


def test_pairs_are_uniform_too():
    counts = independence_counts(5, [0, 4])
    assert set(counts.values()) == {25}


def test_repeated_inputs_rejected():
    with pytest.raises(ValueError):
        independence_counts(5, [1, 6, 2, 3])
