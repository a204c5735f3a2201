"""
4-wise independent hashing via random cubic polynomials over a prime field.

Arithmetic is done on Python ints so the 2^61 - 1 field never overflows.
"""

import itertools
import logging
from collections import Counter
from typing import Sequence, Tuple, Union

import numpy as np

from src.trees.base import TreeError

logger = logging.getLogger(__name__)

MERSENNE_61 = (1 << 61) - 1


class HashCollisionError(TreeError):
    """Two identities hashed to the same surrogate key."""

    def __init__(self, key: int, other: int):
        self.key = key
        self.other = other
        super().__init__(
            f"Hash collision: key {key} has the same surrogate as {other}"
        )


class FourWiseHash:
    """
    h(x) = ((a3 x^3 + a2 x^2 + a1 x + a0) mod p) / p, a value in [0, 1).

    `coefficients` are given low order first: (a0, a1, a2, a3).
    """

    def __init__(
        self, coefficients: Sequence[int], prime: int = MERSENNE_61
    ):
        if prime < 2:
            raise ValueError(f"prime must be >= 2, got {prime}")
        if len(coefficients) != 4:
            raise ValueError("a 4-wise hash needs exactly 4 coefficients")
        self.prime = int(prime)
        self.coefficients: Tuple[int, ...] = tuple(
            int(c) % self.prime for c in coefficients
        )

    @classmethod
    def from_seed(
        cls,
        seed: Union[None, int, np.random.SeedSequence, np.random.Generator],
        prime: int = MERSENNE_61,
    ) -> "FourWiseHash":
        rng = np.random.default_rng(seed)
        coefficients = [
            int(rng.integers(0, prime, dtype=np.uint64)) for _ in range(4)
        ]
        logger.debug("Drew hash coefficients over prime %d", prime)
        return cls(coefficients, prime)

    def raw(self, x: int) -> int:
        """Polynomial value in [0, prime), evaluated by Horner's rule."""
        p = self.prime
        x %= p
        a0, a1, a2, a3 = self.coefficients
        return (((a3 * x + a2) % p * x + a1) % p * x + a0) % p

    def __call__(self, x: int) -> float:
        return self.raw(x) / self.prime

    def __repr__(self) -> str:
        return f"FourWiseHash(prime={self.prime})"


def hash_eval(h: FourWiseHash, x: int) -> float:
    return h(x)


def independence_counts(prime: int, inputs: Sequence[int]) -> Counter:
    """
    Count output tuples for `inputs` over every coefficient tuple.

    For a 4-wise independent family and 4 distinct inputs every one of the
    prime**4 output tuples appears exactly once. Only feasible for toy
    fields.
    """
    if len(set(x % prime for x in inputs)) != len(inputs):
        raise ValueError("inputs must be distinct in the field")
    outputs: Counter = Counter()
    for coefficients in itertools.product(range(prime), repeat=4):
        h = FourWiseHash(coefficients, prime)
        outputs[tuple(h.raw(x) for x in inputs)] += 1
    return outputs


def is_four_wise_independent(prime: int, inputs: Sequence[int]) -> bool:
    counts = independence_counts(prime, inputs)
    expected = prime ** (4 - len(inputs))
    return len(counts) == prime ** len(inputs) and all(
        value == expected for value in counts.values()
    )
