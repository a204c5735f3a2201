"""
Counter-based seed derivation.

A master seed is split into one independent stream per (trial, role), so
adding a structure or a role never shifts the draws any other role sees.
"""

import logging

import numpy as np

logger = logging.getLogger(__name__)

# Stable role ids; append new roles, never renumber.
ROLES = {
    "trace": 0,
    "table": 1,
    "oracle": 2,
    "random_priorities": 3,
    "insert_order": 4,
    "hash": 5,
    "shuffled_random": 6,
    "theory": 7,
}


def derive_seed(master: int, trial: int, role: str) -> np.random.SeedSequence:
    try:
        role_id = ROLES[role]
    except KeyError:
        raise ValueError(f"Unknown seed role {role!r}") from None
    return np.random.SeedSequence(int(master), spawn_key=(int(trial), role_id))


def rng_for(master: int, trial: int, role: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, trial, role))
