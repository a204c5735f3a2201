# flake8: noqa

from .results import ExperimentResult, SweepResult
from .runner import (
    LEARNED_STRUCTURES,
    LEARNED_TREAP,
    RANDOM_TREAP,
    RED_BLACK,
    SHUFFLED_TREAP,
    SPLAY,
    STRUCTURES,
    ConfigError,
    ExperimentConfig,
    MembershipMismatchError,
    build_structures,
    replay,
    run_alpha_sweep,
    run_error_sweep,
    run_synthetic,
    run_trace,
    run_trial,
)
from .seeds import ROLES, derive_seed, rng_for
from .theory import (
    THEORY_KINDS,
    TheoryCheck,
    TheoryReport,
    run_theory_check,
    run_theory_checks,
)
