"""
Experiment runner: build every selected structure per trial, replay the
trace as accesses, and collect comparison totals with analytic references.

Each trial owns its structures and RNG streams (see `src.bench.seeds`), so
trials can run on a process pool and still produce byte-identical CSVs.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src import config as settings
from src.analytics import (
    Distribution,
    expected_learned_cost,
    expected_random_cost,
    mehlhorn_bound,
    random_cost_lower_bound,
    topk_expected_cost,
)
from src.bench.results import ExperimentResult, SweepResult
from src.bench.seeds import derive_seed, rng_for
from src.hashing import FourWiseHash
from src.oracle import (
    FileOracle,
    FrequencyTable,
    MultiplicativeFreq,
    OracleKind,
    Perfect,
    RandomOracle,
    TopK,
    assign_priorities,
)
from src.shuffled_treap import ShuffledTreap
from src.trees import CountingTree, RedBlackTree, SplayTree, Treap
from src.workload import (
    Mode,
    Trace,
    ZipfSpec,
    empirical_frequencies,
    generate_zipf,
    load_trace_csv,
)

logger = logging.getLogger(__name__)

LEARNED_TREAP = "learned_treap"
SHUFFLED_TREAP = "shuffled_learned_treap"
RANDOM_TREAP = "random_treap"
SPLAY = "splay"
RED_BLACK = "red_black"
STRUCTURES = (LEARNED_TREAP, SHUFFLED_TREAP, RANDOM_TREAP, SPLAY, RED_BLACK)
LEARNED_STRUCTURES = (LEARNED_TREAP, SHUFFLED_TREAP)


class ConfigError(ValueError):
    """Raised for invalid experiment configurations."""

    pass


class MembershipMismatchError(RuntimeError):
    """Structures disagreed on found/value answers for the same trace."""

    def __init__(self, trial: int, structures: Dict[str, Tuple[int, int]]):
        self.trial = trial
        self.structures = structures
        super().__init__(
            f"Trial {trial}: structures disagree on membership answers "
            f"{structures}"
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything one benchmark invocation needs.

    `n` is a tuple so one run can sweep several key counts. When
    `trace_path` is set the Zipf fields (n, alpha, mode) are ignored.
    """

    structures: Tuple[str, ...] = STRUCTURES
    n: Tuple[int, ...] = (10_000,)
    alpha: float = 1.0
    m: int = 100_000
    mode: Mode = Mode.EXACT
    oracle: OracleKind = field(default_factory=Perfect)
    trials: int = settings.BENCH_TRIALS
    seed: int = settings.BENCH_SEED
    out: Optional[Path] = None
    trace_path: Optional[Path] = None
    top_fraction: Optional[float] = None
    identity_ranks: bool = False
    hash_prime: int = settings.HASH_PRIME
    workers: int = settings.BENCH_WORKERS

    def validate(self) -> "ExperimentConfig":
        if not self.structures:
            raise ConfigError("at least one structure is required")
        unknown = [s for s in self.structures if s not in STRUCTURES]
        if unknown:
            raise ConfigError(
                f"unknown structures {unknown}; choose from {STRUCTURES}"
            )
        if len(set(self.structures)) != len(self.structures):
            raise ConfigError("structures must not repeat")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.trace_path is None:
            if not self.n or any(n < 1 for n in self.n):
                raise ConfigError(f"n values must be >= 1, got {self.n}")
            if self.m < 1:
                raise ConfigError(f"m must be >= 1, got {self.m}")
            if not self.alpha > 0:
                raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if self.top_fraction is not None and not 0 < self.top_fraction <= 1:
            raise ConfigError(
                f"top fraction must be in (0, 1], got {self.top_fraction}"
            )
        return self

    def describe(self) -> dict:
        """JSON-friendly summary used for run history."""
        return {
            "structures": list(self.structures),
            "n": list(self.n),
            "alpha": self.alpha,
            "m": self.m,
            "mode": Mode(self.mode).value,
            "oracle": self.oracle.label,
            "trials": self.trials,
            "seed": self.seed,
            "trace_path": str(self.trace_path) if self.trace_path else None,
            "top_fraction": self.top_fraction,
            "identity_ranks": self.identity_ranks,
        }


# --- Building ---


def _insertion_order(table: FrequencyTable, master: int, trial: int):
    rng = rng_for(master, trial, "insert_order")
    keys = np.array(table.keys, dtype=np.int64)
    return [int(k) for k in rng.permutation(keys)]


def build_structures(
    config: ExperimentConfig, table: FrequencyTable, trial: int
) -> Dict[str, CountingTree]:
    """Build the selected structures over `table`'s keys, counters zeroed."""
    learned = assign_priorities(
        config.oracle, table, derive_seed(config.seed, trial, "oracle")
    )
    order = _insertion_order(table, config.seed, trial)
    built: Dict[str, CountingTree] = {}
    for name in config.structures:
        if name == LEARNED_TREAP:
            tree = Treap.build((k, 1, learned[k]) for k in table.keys)
        elif name == RANDOM_TREAP:
            priorities = assign_priorities(
                RandomOracle(),
                table,
                derive_seed(config.seed, trial, "random_priorities"),
            )
            tree = Treap.build((k, 1, priorities[k]) for k in table.keys)
        elif name == SHUFFLED_TREAP:
            hash_fn = FourWiseHash.from_seed(
                derive_seed(config.seed, trial, "hash"), config.hash_prime
            )
            tree = ShuffledTreap(
                hash_fn, derive_seed(config.seed, trial, "shuffled_random")
            )
            for key in order:
                tree.insert(key, 1, learned[key])
        elif name == SPLAY:
            tree = SplayTree()
            for key in order:
                tree.insert(key)
        else:
            tree = RedBlackTree()
            for key in order:
                tree.insert(key)
        tree.name = name
        tree.reset_counters()
        built[name] = tree
        logger.debug("Trial %d: built %s over %d keys", trial, name, len(tree))
    return built


def replay(tree: CountingTree, queries: Sequence[int]) -> Tuple[int, int]:
    """Access every query; returns (found count, sum of found values)."""
    access = tree.access
    found = total = 0
    for key in queries:
        result = access(key)
        if result.found:
            found += 1
            total += result.value
    return found, total


# --- Analytic references ---


def _analytic_columns(
    name: str, oracle: OracleKind, table: FrequencyTable, m: int
) -> Tuple[float, float]:
    """(expected total comparisons, lower bound on the total)."""
    dist = Distribution(table.probabilities)
    n = table.n
    lower = m * mehlhorn_bound(dist)
    random_cost = m * (expected_random_cost(n) + 1.0)
    if name == RANDOM_TREAP:
        return random_cost, m * (random_cost_lower_bound(n) + 1.0)
    if name not in LEARNED_STRUCTURES:
        return math.nan, lower
    if isinstance(oracle, RandomOracle):
        return random_cost, lower
    if isinstance(oracle, TopK):
        k = min(oracle.k, n)
        return m * topk_expected_cost(k, n, table.top_mass(k)), lower
    # Perfect, File, noisy and multiplicative oracles are all referenced
    # against the perfect-oracle expectation.
    return m * expected_learned_cost(dist), lower


# --- Trials ---


def _trial_trace(config: ExperimentConfig, n: int, trial: int) -> Trace:
    spec = ZipfSpec(
        n=n,
        alpha=config.alpha,
        m=config.m,
        seed=derive_seed(config.seed, trial, "trace"),
        mode=config.mode,
        permute=not config.identity_ranks,
    )
    trace = generate_zipf(spec)
    if config.top_fraction is not None:
        trace = trace.top_fraction(config.top_fraction)
    return trace


def run_trial(
    config: ExperimentConfig,
    trial: int,
    n: Optional[int] = None,
    trace: Optional[Trace] = None,
) -> List[dict]:
    """
    Run one trial and return its result rows in structure order.

    Either `n` (synthetic) or a pre-loaded `trace` must be given.

    Raises:
        MembershipMismatchError: if structures answer differently.
    """
    alpha = config.alpha
    if trace is None:
        trace = _trial_trace(config, n, trial)
    else:
        alpha = math.nan
    table = empirical_frequencies(
        trace, derive_seed(config.seed, trial, "table")
    )
    structures = build_structures(config, table, trial)
    queries = trace.queries.tolist()
    m = len(queries)

    answers: Dict[str, Tuple[int, int]] = {}
    rows = []
    for name, tree in structures.items():
        answers[name] = replay(tree, queries)
        expected, lower = _analytic_columns(name, config.oracle, table, m)
        rows.append(
            {
                "structure": name,
                "trial": trial,
                "n": table.n,
                "alpha": alpha,
                "m": m,
                "oracle": config.oracle.label,
                "comparisons": tree.comparisons,
                "rotations": tree.rotations,
                "overhead_ops": tree.overhead_ops,
                "ops": tree.ops,
                "analytic_expected": expected,
                "analytic_lower_bound": lower,
            }
        )
    if len(set(answers.values())) > 1:
        logger.error("Trial %d membership mismatch: %s", trial, answers)
        raise MembershipMismatchError(trial, answers)
    logger.info("Finished trial %d (n=%d, m=%d)", trial, table.n, m)
    return rows


def _run_trials(
    config: ExperimentConfig,
    n: Optional[int] = None,
    trace: Optional[Trace] = None,
) -> List[dict]:
    trials = range(config.trials)
    if config.workers == 1:
        batches = [run_trial(config, t, n, trace) for t in trials]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(run_trial, config, t, n, trace) for t in trials
            ]
            # Collected in submission order, so output does not depend on
            # completion order.
            batches = [future.result() for future in futures]
    return [row for batch in batches for row in batch]


def _prepare_file_oracle(config: ExperimentConfig) -> ExperimentConfig:
    # Read the prediction file once instead of once per trial.
    if isinstance(config.oracle, FileOracle):
        oracle = config.oracle
        loaded = replace(oracle, predictions=oracle.load())
        return replace(config, oracle=loaded)
    return config


def _finish(config: ExperimentConfig, result: ExperimentResult):
    if config.out is not None:
        result.write_csv(config.out)
    return result


def run_synthetic(config: ExperimentConfig) -> ExperimentResult:
    """Zipf workloads: one row block per n, trials x structures each."""
    config = _prepare_file_oracle(config.validate())
    logger.info(
        "Synthetic run: n=%s alpha=%g m=%d oracle=%s trials=%d",
        config.n,
        config.alpha,
        config.m,
        config.oracle.label,
        config.trials,
    )
    rows: List[dict] = []
    for n in config.n:
        rows.extend(_run_trials(config, n=n))
    return _finish(config, ExperimentResult(rows))


def run_trace(config: ExperimentConfig) -> ExperimentResult:
    """Replay a trace file against structures built over its keys."""
    config = config.validate()
    if config.trace_path is None:
        raise ConfigError("trace runs need a trace path")
    config = _prepare_file_oracle(config)
    trace = load_trace_csv(config.trace_path)
    if config.top_fraction is not None:
        trace = trace.top_fraction(config.top_fraction)
    logger.info(
        "Trace run: %s (%d queries, %d keys) oracle=%s trials=%d",
        config.trace_path,
        len(trace),
        trace.n,
        config.oracle.label,
        config.trials,
    )
    return _finish(config, ExperimentResult(_run_trials(config, trace=trace)))


def run_error_sweep(
    config: ExperimentConfig, deltas: Sequence[float]
) -> SweepResult:
    """
    Multiplicative-error sweep over learned structures.

    Every delta reuses the same seeds, hence the same traces and the same
    per-key error exponents scaled by ln(delta).
    """
    if not deltas:
        raise ConfigError("error sweep needs at least one delta")
    bad = [d for d in deltas if d < 1]
    if bad:
        raise ConfigError(f"deltas must be >= 1, got {bad}")
    structures = tuple(
        s for s in config.structures if s in LEARNED_STRUCTURES
    ) or (LEARNED_TREAP,)
    sweep = SweepResult("delta")
    for delta in sorted(deltas):
        point = replace(
            config,
            structures=structures,
            oracle=MultiplicativeFreq(delta),
            out=None,
        )
        sweep.results[delta] = run_synthetic(point)
    for name in structures:
        logger.info(
            "Error sweep %s: costs %s, monotone=%s",
            name,
            sweep.mean_costs(name),
            sweep.is_monotone(name),
        )
    if config.out is not None:
        sweep.write_csv(config.out)
    return sweep


def run_alpha_sweep(
    config: ExperimentConfig, alphas: Sequence[float]
) -> SweepResult:
    """Fixed n, varying Zipf parameter; reports savings versus splay."""
    if not alphas:
        raise ConfigError("alpha sweep needs at least one alpha")
    sweep = SweepResult("alpha")
    for alpha in sorted(alphas):
        sweep.results[alpha] = run_synthetic(
            replace(config, alpha=alpha, out=None)
        )
    if LEARNED_TREAP in config.structures and SPLAY in config.structures:
        logger.info(
            "Learned treap savings versus splay by alpha: %s",
            sweep.savings(LEARNED_TREAP, SPLAY),
        )
    if config.out is not None:
        sweep.write_csv(config.out)
    return sweep
