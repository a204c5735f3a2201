"""
Monte Carlo checks of the closed forms in `src.analytics`.

Each check kind returns a TheoryReport: one row per compared quantity with
the empirical mean, the analytic value, the standard error and a pass flag.
Two-sided checks pass when |mean - analytic| <= 3 standard errors; the
bounds that are inequalities in theory are checked one-sided.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src import config as settings
from src.analytics import (
    Distribution,
    expected_learned_depth,
    expected_random_cost,
    expected_random_depth,
    mehlhorn_bound,
    noisy_gap_bound,
    random_cost_lower_bound,
    shannon_entropy,
    topk_expected_cost,
    zipf_distribution,
    zipf_learned_cost,
    zipf_learned_cost_closed_form,
)
from src.bench.runner import (
    LEARNED_TREAP,
    RANDOM_TREAP,
    ConfigError,
    ExperimentConfig,
    run_synthetic,
)
from src.bench.seeds import derive_seed, rng_for
from src.hashing import FourWiseHash, is_four_wise_independent
from src.oracle import (
    FrequencyTable,
    NoisyRank,
    Perfect,
    RandomOracle,
    TopK,
    assign_priorities,
)
from src.shuffled_treap import ShuffledTreap
from src.trees import Priority, Treap

logger = logging.getLogger(__name__)

SE_MULTIPLIER = 3.0
EXACT_TOLERANCE = 1e-9


@dataclass
class TheoryCheck:
    label: str
    empirical: float
    analytic: float
    stderr: float
    passed: bool
    note: str = ""


@dataclass
class TheoryReport:
    kind: str
    params: dict
    checks: List[TheoryCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, check: TheoryCheck) -> None:
        if not check.passed:
            logger.warning(
                "%s: %s failed (empirical=%.6g, analytic=%.6g, se=%.3g)",
                self.kind,
                check.label,
                check.empirical,
                check.analytic,
                check.stderr,
            )
        self.checks.append(check)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([vars(check) for check in self.checks])
        frame.insert(0, "kind", self.kind)
        return frame

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.12g")
        return path

    def summary(self) -> str:
        lines = [f"{self.kind}: {'PASS' if self.passed else 'FAIL'}"]
        for check in self.checks:
            status = "ok  " if check.passed else "FAIL"
            lines.append(
                f"  [{status}] {check.label}: empirical={check.empirical:.6g}"
                f" analytic={check.analytic:.6g} se={check.stderr:.3g}"
                + (f" ({check.note})" if check.note else "")
            )
        return "\n".join(lines)


def _mean_se(values: Sequence[float]):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), 0.0
    return (
        float(values.mean()),
        float(values.std(ddof=1) / math.sqrt(values.size)),
    )


def _two_sided(label, values, analytic, note="") -> TheoryCheck:
    mean, se = _mean_se(values)
    passed = abs(mean - analytic) <= SE_MULTIPLIER * se + EXACT_TOLERANCE
    return TheoryCheck(label, mean, analytic, se, passed, note)


def _all_depths(treap: Treap) -> Dict[int, int]:
    """One-based depth of every key, by an explicit-stack walk."""
    depths: Dict[int, int] = {}
    stack = [(treap.root, 1)] if treap.root is not None else []
    while stack:
        node, depth = stack.pop()
        depths[node.key] = depth
        for child in (node.left, node.right):
            if child is not None:
                stack.append((child, depth + 1))
    return depths


def _zipf_table(
    rank_keys: Sequence[int], alpha: float, seed
) -> FrequencyTable:
    """Table whose rank r key is rank_keys[r - 1], weights Zipf(alpha)."""
    p = zipf_distribution(len(rank_keys), alpha).probabilities
    return FrequencyTable(
        {int(k): float(w) for k, w in zip(rank_keys, p)}, seed
    )


def _learned_rank_depths(
    n: int, alpha: float, trials: int, seed: int
) -> np.ndarray:
    """depths[t, i - 1] = depth of the rank-i key in trial t."""
    depths = np.zeros((trials, n), dtype=np.int64)
    for trial in range(trials):
        rng = rng_for(seed, trial, "theory")
        rank_keys = rng.permutation(np.arange(1, n + 1))
        table = _zipf_table(
            rank_keys, alpha, derive_seed(seed, trial, "table")
        )
        priorities = assign_priorities(
            Perfect(), table, derive_seed(seed, trial, "oracle")
        )
        treap = Treap.build((k, 1, priorities[k]) for k in table.keys)
        by_key = _all_depths(treap)
        depths[trial] = [by_key[k] for k in table.keys]
    return depths


def _random_treap(n: int, rng: np.random.Generator) -> Treap:
    draws = rng.random((n, 2))
    return Treap.build(
        (key, 1, Priority(float(a), float(b)))
        for key, (a, b) in zip(range(1, n + 1), draws)
    )


def _indices_up_to(indices: Sequence[int], n: int) -> List[int]:
    """Distinct requested ranks that exist for this n; n when none do."""
    if any(i < 1 for i in indices):
        raise ConfigError(f"ranks must be >= 1, got {list(indices)}")
    kept = [i for i in dict.fromkeys(indices) if i <= n]
    return kept or [n]


# --- Check kinds ---


def check_learned_depth(report: TheoryReport, p: dict) -> None:
    n, trials = p["n"], p["trials"]
    if n < 2:
        raise ConfigError(f"learned_depth needs n >= 2, got {n}")
    depths = _learned_rank_depths(n, p["alpha"], trials, p["seed"])
    for i in _indices_up_to(p["indices"], n):
        report.add(
            _two_sided(
                f"mean depth(e_{i})",
                depths[:, i - 1],
                expected_learned_depth(i),
            )
        )
    for i in (1, 2):
        exact = float(np.mean(depths[:, i - 1] == i))
        report.add(
            TheoryCheck(
                f"depth(e_{i}) == {i} in every trial",
                exact,
                1.0,
                0.0,
                exact == 1.0,
            )
        )


def check_depth_tail(report: TheoryReport, p: dict) -> None:
    n, trials = p["n"], p["trials"]
    depths = _learned_rank_depths(n, p["alpha"], trials, p["seed"])
    fractions = []
    for i in _indices_up_to(p["indices"], n):
        threshold = 8 * math.log2(i) + 8
        fraction = float(np.mean(depths[:, i - 1] > threshold))
        fractions.append(fraction)
        report.add(
            TheoryCheck(
                f"P[depth(e_{i}) > {threshold:.1f}]",
                fraction,
                0.0,
                math.sqrt(fraction * (1 - fraction) / trials),
                fraction <= p["max_tail"],
            )
        )
    report.add(
        TheoryCheck(
            "tail fraction does not grow with i",
            fractions[-1],
            fractions[0],
            0.0,
            fractions[-1] <= fractions[0],
        )
    )


def check_random_depth(report: TheoryReport, p: dict) -> None:
    n, trials = p["n"], p["trials"]
    indices = _indices_up_to(p["indices"] or (1, max(1, n // 2), n), n)
    samples = {i: [] for i in indices}
    for trial in range(trials):
        treap = _random_treap(n, rng_for(p["seed"], trial, "theory"))
        for i in indices:
            samples[i].append(treap.depth_of(i) - 1)
    for i in indices:
        report.add(
            _two_sided(
                f"mean zero-based depth(key {i})",
                samples[i],
                expected_random_depth(i, n),
            )
        )


def check_random_cost_bound(report: TheoryReport, p: dict) -> None:
    n, trials = p["n"], p["trials"]
    bound = random_cost_lower_bound(n)
    distributions = {
        "uniform": Distribution.uniform(n),
        "zipf(1)": zipf_distribution(n, 1.0),
        "point mass": Distribution.point_mass(n),
    }
    costs: Dict[str, List[float]] = {name: [] for name in distributions}
    for trial in range(trials):
        rng = rng_for(p["seed"], trial, "theory")
        by_key = _all_depths(_random_treap(n, rng))
        zero_based = np.array([by_key[k] - 1 for k in range(1, n + 1)])
        for name, dist in distributions.items():
            rank_keys = rng.permutation(n)
            costs[name].append(
                float(np.dot(dist.probabilities, zero_based[rank_keys]))
            )
    for name, values in costs.items():
        mean, se = _mean_se(values)
        report.add(
            TheoryCheck(
                f"{name}: mean zero-based cost >= 2H_(n+1) - 4",
                mean,
                bound,
                se,
                mean >= bound - SE_MULTIPLIER * se,
                note=f"exact mean {expected_random_cost(n):.6g}",
            )
        )


def _synthetic(p: dict, **overrides) -> ExperimentConfig:
    base = dict(
        structures=(LEARNED_TREAP,),
        n=(p["n"],) if "n" in p else (),
        alpha=p["alpha"],
        m=p["m"],
        trials=p["trials"],
        seed=p["seed"],
        workers=p["workers"],
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def check_learned_cost(report: TheoryReport, p: dict) -> None:
    result = run_synthetic(_synthetic(p))
    mean, se = _mean_se(result.per_access(LEARNED_TREAP))
    analytic = zipf_learned_cost(p["n"], p["alpha"])
    error = abs(mean - analytic) / analytic
    report.add(
        TheoryCheck(
            "learned mean comparisons per access",
            mean,
            analytic,
            se,
            error <= p["tolerance"],
            note=f"relative error {error:.2%}",
        )
    )


def check_zipf_closed_form(report: TheoryReport, p: dict) -> None:
    for n in p["sizes"]:
        direct = zipf_learned_cost(n, 1.0)
        closed = zipf_learned_cost_closed_form(n)
        report.add(
            TheoryCheck(
                f"n={n}: direct sum == 2C/H_n - 1",
                direct,
                closed,
                0.0,
                abs(direct - closed) <= EXACT_TOLERANCE,
            )
        )


def check_zipf_constant(report: TheoryReport, p: dict) -> None:
    alpha = p["alpha"]
    sizes = list(p["sizes"])
    costs = [zipf_learned_cost(n, alpha) for n in sizes]
    growth = [b / a - 1.0 for a, b in zip(costs, costs[1:])]
    for (lo, hi), g in zip(zip(sizes, sizes[1:]), growth):
        report.add(
            TheoryCheck(
                f"analytic growth n={lo}->{hi}",
                g,
                0.0,
                0.0,
                True,
                note="informational",
            )
        )
    report.add(
        TheoryCheck(
            "growth per decade shrinks",
            growth[-1],
            growth[0],
            0.0,
            all(b < a for a, b in zip(growth, growth[1:])),
        )
    )
    report.add(
        TheoryCheck(
            f"last decade growth < {p['max_growth']:.0%}",
            growth[-1],
            p["max_growth"],
            0.0,
            growth[-1] < p["max_growth"],
        )
    )
    for n in p["empirical_sizes"]:
        result = run_synthetic(_synthetic(p, n=(n,), alpha=alpha))
        mean, se = _mean_se(result.per_access(LEARNED_TREAP))
        analytic = result.analytic_per_access(LEARNED_TREAP)
        error = abs(mean - analytic) / analytic
        report.add(
            TheoryCheck(
                f"n={n}: learned cost matches trace expectation",
                mean,
                analytic,
                se,
                error <= p["tolerance"],
                note=f"relative error {error:.2%}",
            )
        )


def check_cost_ratio(report: TheoryReport, p: dict) -> None:
    result = run_synthetic(
        _synthetic(p, structures=(LEARNED_TREAP, RANDOM_TREAP))
    )
    learned = result.mean_cost(LEARNED_TREAP)
    ratio = result.mean_cost(RANDOM_TREAP) / learned
    lo, hi = p["ratio_range"]
    report.add(
        TheoryCheck(
            f"random / learned cost ratio in [{lo}, {hi}]",
            ratio,
            2.0,
            0.0,
            lo <= ratio <= hi,
        )
    )


def check_noisy_gap(report: TheoryReport, p: dict) -> None:
    perfect = run_synthetic(_synthetic(p, oracle=Perfect()))
    baseline = perfect.per_access(LEARNED_TREAP)
    for eps, delta in p["pairs"]:
        noisy = run_synthetic(_synthetic(p, oracle=NoisyRank(eps, delta)))
        gaps = noisy.per_access(LEARNED_TREAP) - baseline
        bound = noisy_gap_bound(eps, delta)
        _, se = _mean_se(gaps)
        report.add(
            TheoryCheck(
                f"eps={eps:g}, delta={delta:g}: max per-access gap <= bound",
                float(gaps.max()),
                bound,
                se,
                bool(np.all(gaps <= bound)),
                note=f"mean gap {float(gaps.mean()):.4g}",
            )
        )


def check_random_oracle(report: TheoryReport, p: dict) -> None:
    result = run_synthetic(
        _synthetic(
            p,
            structures=(LEARNED_TREAP, RANDOM_TREAP),
            oracle=RandomOracle(),
        )
    )
    learned = result.mean_cost(LEARNED_TREAP)
    random_cost = result.mean_cost(RANDOM_TREAP)
    report.add(
        TheoryCheck(
            "random-oracle learned cost <= random treap cost + 1",
            learned,
            random_cost + 1.0,
            result.sem_cost(LEARNED_TREAP),
            learned <= random_cost + 1.0,
        )
    )


def check_topk(report: TheoryReport, p: dict) -> None:
    dist = zipf_distribution(p["n"], p["alpha"])
    for k in _indices_up_to(p["ks"], p["n"]):
        result = run_synthetic(_synthetic(p, oracle=TopK(k)))
        mean, se = _mean_se(result.per_access(LEARNED_TREAP))
        bound = topk_expected_cost(k, p["n"], dist.top_mass(k))
        report.add(
            TheoryCheck(
                f"k={k}: mean cost <= 2(pH_k + (1-p)H_n) - 1",
                mean,
                bound,
                se,
                mean <= bound + SE_MULTIPLIER * se,
                note=f"ratio to bound {mean / bound:.3f}",
            )
        )


def check_shuffled_depth(report: TheoryReport, p: dict) -> None:
    n, trials, seed = p["n"], p["trials"], p["seed"]
    # Adversarial layout: the rank-i key is the integer i.
    rank_keys = np.arange(1, n + 1)
    probabilities = zipf_distribution(n, p["alpha"]).probabilities
    depth_sums = np.zeros(n)
    shuffled_costs = []
    plain_costs = []
    for trial in range(trials):
        table = _zipf_table(
            rank_keys, p["alpha"], derive_seed(seed, trial, "table")
        )
        priorities = assign_priorities(
            Perfect(), table, derive_seed(seed, trial, "oracle")
        )
        hash_fn = FourWiseHash.from_seed(
            derive_seed(seed, trial, "hash"), p["prime"]
        )
        shuffled = ShuffledTreap(
            hash_fn, derive_seed(seed, trial, "shuffled_random")
        )
        order = rng_for(seed, trial, "insert_order").permutation(rank_keys)
        for key in order.tolist():
            shuffled.insert(key, 1, priorities[key])
        by_surrogate = _all_depths(shuffled.learned)
        depths = np.array(
            [by_surrogate[hash_fn.raw(int(k))] for k in rank_keys],
            dtype=float,
        )
        depth_sums += depths
        shuffled_costs.append(float(np.dot(probabilities, depths)))

        plain = Treap.build((k, 1, priorities[k]) for k in table.keys)
        by_key = _all_depths(plain)
        plain_depths = np.array([by_key[int(k)] for k in rank_keys])
        plain_costs.append(float(np.dot(probabilities, plain_depths)))

    mean_depths = depth_sums / trials
    x = np.log2(np.arange(2, n + 1))
    y = mean_depths[1:]
    slope, intercept = np.polyfit(x, y, 1)
    fitted = intercept + slope * x
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    report.add(
        TheoryCheck(
            f"log2 fit slope <= {p['max_slope']}",
            float(slope),
            p["max_slope"],
            0.0,
            slope <= p["max_slope"],
            note=f"intercept {intercept:.3f}",
        )
    )
    report.add(
        TheoryCheck(
            f"log2 fit R^2 >= {p['min_r_squared']}",
            r_squared,
            p["min_r_squared"],
            0.0,
            r_squared >= p["min_r_squared"],
        )
    )
    shuffled_mean, shuffled_se = _mean_se(shuffled_costs)
    plain_mean, _ = _mean_se(plain_costs)
    report.add(
        TheoryCheck(
            "shuffled cost < plain learned cost on sorted ranks",
            shuffled_mean,
            plain_mean,
            shuffled_se,
            shuffled_mean < plain_mean,
        )
    )


def check_hash_independence(report: TheoryReport, p: dict) -> None:
    prime = p["toy_prime"]
    for inputs in p["input_sets"]:
        ok = is_four_wise_independent(prime, inputs)
        report.add(
            TheoryCheck(
                f"p={prime}, inputs={tuple(inputs)}: every output tuple once",
                1.0 if ok else 0.0,
                1.0,
                0.0,
                ok,
                note=f"{prime ** 4} coefficient tuples",
            )
        )


def check_static_optimality(report: TheoryReport, p: dict) -> None:
    for n in p["sizes"]:
        dist = zipf_distribution(n, 1.0)
        cost = zipf_learned_cost(n, 1.0)
        ratio = cost / shannon_entropy(dist)
        report.add(
            TheoryCheck(
                f"n={n}: cost / entropy <= {p['max_ratio']}",
                ratio,
                p["max_ratio"],
                0.0,
                ratio <= p["max_ratio"] and cost >= mehlhorn_bound(dist),
            )
        )


_DEFAULT_TRIALS = settings.THEORY_TRIALS

# kind -> (check, default parameters)
THEORY_KINDS: Dict[str, tuple] = {
    "learned_depth": (
        check_learned_depth,
        {
            "n": 1000,
            "alpha": 1.0,
            "trials": _DEFAULT_TRIALS,
            "indices": (1, 2, 10, 100, 1000),
        },
    ),
    "random_depth": (
        check_random_depth,
        {"n": 1000, "trials": _DEFAULT_TRIALS, "indices": ()},
    ),
    "depth_tail": (
        check_depth_tail,
        {
            "n": 1000,
            "alpha": 1.0,
            "trials": _DEFAULT_TRIALS,
            "indices": (2, 10, 100, 1000),
            "max_tail": 0.05,
        },
    ),
    "random_cost_bound": (
        check_random_cost_bound,
        {"n": 1000, "trials": _DEFAULT_TRIALS},
    ),
    "learned_cost": (
        check_learned_cost,
        {
            "n": 10_000,
            "alpha": 1.0,
            "m": 100_000,
            "trials": 10,
            "tolerance": 0.03,
        },
    ),
    "zipf_closed_form": (
        check_zipf_closed_form,
        {"sizes": (10, 100, 1000, 10_000, 100_000, 1_000_000)},
    ),
    "zipf_constant": (
        check_zipf_constant,
        {
            "alpha": 1.5,
            "sizes": (1000, 10_000, 100_000, 1_000_000),
            "max_growth": 0.05,
            "empirical_sizes": (1000, 100_000),
            "m": 100_000,
            "trials": 5,
            "tolerance": 0.03,
        },
    ),
    "cost_ratio": (
        check_cost_ratio,
        {
            "n": 10_000,
            "alpha": 1.0,
            "m": 100_000,
            "trials": 10,
            "ratio_range": (1.7, 2.3),
        },
    ),
    "noisy_gap": (
        check_noisy_gap,
        {
            "n": 1000,
            "alpha": 1.0,
            "m": 100_000,
            "trials": 10,
            "pairs": ((1.0, 1.0), (2.0, 5.0)),
        },
    ),
    "random_oracle": (
        check_random_oracle,
        {"n": 1000, "alpha": 1.0, "m": 100_000, "trials": 30},
    ),
    "topk": (
        check_topk,
        {
            "n": 1000,
            "alpha": 1.0,
            "m": 100_000,
            "trials": 30,
            "ks": (10, 100),
        },
    ),
    "shuffled_depth": (
        check_shuffled_depth,
        {
            "n": 1000,
            "alpha": 1.0,
            "trials": 100,
            "prime": settings.HASH_PRIME,
            "max_slope": 3.0,
            "min_r_squared": 0.9,
        },
    ),
    "hash_independence": (
        check_hash_independence,
        {"toy_prime": 5, "input_sets": ((0, 1, 2, 3), (1, 2, 3, 4))},
    ),
    "static_optimality": (
        check_static_optimality,
        {
            "sizes": (100, 1000, 10_000, 100_000, 1_000_000),
            "max_ratio": 3.0,
        },
    ),
}


def run_theory_check(
    kind: str, params: Optional[dict] = None
) -> TheoryReport:
    """
    Run one named check with its defaults overridden by `params`.

    Common params: seed (default BENCH_SEED), trials, workers.

    Raises:
        ConfigError: unknown kind or parameter name.
    """
    try:
        check, defaults = THEORY_KINDS[kind]
    except KeyError:
        raise ConfigError(
            f"unknown theory kind {kind!r}; choose from "
            f"{sorted(THEORY_KINDS)}"
        ) from None
    merged = dict(defaults)
    merged.setdefault("seed", settings.BENCH_SEED)
    merged.setdefault("workers", settings.BENCH_WORKERS)
    params = {k: v for k, v in (params or {}).items() if v is not None}
    unknown = set(params) - set(merged)
    if unknown:
        raise ConfigError(f"{kind} does not take {sorted(unknown)}")
    merged.update(params)
    logger.info("Running theory check %s with %s", kind, merged)
    report = TheoryReport(kind, merged)
    check(report, merged)
    status = "pass" if report.passed else "FAIL"
    logger.info("Theory check %s: %s", kind, status)
    return report


def run_theory_checks(
    kinds: Iterable[str], params: Optional[dict] = None
) -> List[TheoryReport]:
    """Run several kinds, passing each only the params it accepts."""
    reports = []
    for kind in kinds:
        accepted = set(THEORY_KINDS.get(kind, (None, {}))[1]) | {
            "seed",
            "workers",
        }
        own = {k: v for k, v in (params or {}).items() if k in accepted}
        reports.append(run_theory_check(kind, own))
    return reports

