"""
Zipfian query traces: generation, ingestion and frequency tabulation.

Keys are 1..n. Rank r is mapped to a key through a seeded permutation so
that key order and rank order are independent; turning the permutation
off gives the adversarial layout where rank order equals key order.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from src.analytics import zipf_distribution
from src.oracle import FrequencyTable, SeedLike

logger = logging.getLogger(__name__)


class WorkloadError(ValueError):
    """Raised for invalid workload parameters or traces."""

    pass


class TraceFileError(WorkloadError):
    """Raised for unreadable, empty or malformed trace files."""

    def __init__(self, path: Path, line: Optional[int], message: str):
        self.path = Path(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{where}: {message}")


class Mode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class ZipfSpec:
    n: int
    alpha: float
    m: int
    seed: SeedLike = 0
    mode: Mode = Mode.EXACT
    permute: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise WorkloadError(f"n must be >= 1, got {self.n}")
        if self.m < 1:
            raise WorkloadError(f"m must be >= 1, got {self.m}")
        if not self.alpha > 0:
            raise WorkloadError(f"alpha must be > 0, got {self.alpha}")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass(frozen=True, eq=False)
class Trace:
    """
    A query sequence over a fixed key universe.

    `permutation[r - 1]` is the key of rank r for generated traces; it is
    None for ingested traces, whose ranks are only known empirically.
    """

    queries: np.ndarray
    key_universe: Tuple[int, ...]
    permutation: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        queries = np.asarray(self.queries, dtype=np.int64)
        object.__setattr__(self, "queries", queries)
        universe = np.asarray(self.key_universe, dtype=np.int64)
        unknown = np.setdiff1d(queries, universe)
        if unknown.size:
            raise WorkloadError(
                f"{unknown.size} query keys are outside the key universe, "
                f"e.g. {int(unknown[0])}"
            )
        if self.permutation is not None and not np.array_equal(
            np.sort(self.permutation), np.sort(universe)
        ):
            raise WorkloadError("permutation is not a bijection on the keys")

    def __len__(self) -> int:
        return int(self.queries.size)

    @property
    def n(self) -> int:
        return len(self.key_universe)

    def counts(self) -> dict:
        keys, counts = np.unique(self.queries, return_counts=True)
        return {int(k): int(c) for k, c in zip(keys, counts)}

    def top_fraction(self, fraction: float) -> "Trace":
        """
        Keep only queries to the ceil(fraction * distinct) most frequent
        keys (ties go to the smaller key).
        """
        if not 0 < fraction <= 1:
            raise WorkloadError(f"fraction must be in (0, 1], got {fraction}")
        counts = self.counts()
        ranked = sorted(counts, key=lambda key: (-counts[key], key))
        kept = ranked[: math.ceil(fraction * len(ranked))]
        mask = np.isin(self.queries, kept)
        return Trace(self.queries[mask], tuple(sorted(kept)))


def _exact_counts(shares: np.ndarray, m: int) -> np.ndarray:
    """Largest-remainder rounding of `shares` to integers summing to m."""
    counts = np.floor(shares).astype(np.int64)
    short = m - int(counts.sum())
    if short > 0:
        order = np.argsort(-(shares - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def zipf_counts(n: int, alpha: float, m: int) -> np.ndarray:
    """Rounded Zipf share per rank (index 0 is rank 1)."""
    p = zipf_distribution(n, alpha).probabilities
    return _exact_counts(m * p, m)


def generate_zipf(spec: ZipfSpec) -> Trace:
    """
    Generate a Zipf trace.

    Exact mode emits every rank exactly its rounded share of m, in shuffled
    order; Sampled mode draws m i.i.d. ranks. Deterministic in spec.seed.
    """
    rng = np.random.default_rng(spec.seed)
    keys = np.arange(1, spec.n + 1, dtype=np.int64)
    permutation = rng.permutation(keys) if spec.permute else keys

    if spec.mode is Mode.EXACT:
        counts = zipf_counts(spec.n, spec.alpha, spec.m)
        ranks = np.repeat(np.arange(spec.n), counts)
        rng.shuffle(ranks)
    else:
        p = zipf_distribution(spec.n, spec.alpha).probabilities
        ranks = rng.choice(spec.n, size=spec.m, p=p)

    logger.debug(
        "Generated %s Zipf trace n=%d alpha=%g m=%d",
        spec.mode.value,
        spec.n,
        spec.alpha,
        spec.m,
    )
    return Trace(permutation[ranks], tuple(int(k) for k in keys), permutation)


def empirical_frequencies(
    trace: Trace, seed: SeedLike = None
) -> FrequencyTable:
    """
    Tabulate query counts over the whole key universe.

    Keys that are never queried get frequency 0. Equal counts are ranked by
    a seeded draw.
    """
    if len(trace) == 0:
        raise WorkloadError("cannot tabulate an empty trace")
    counts = dict.fromkeys(trace.key_universe, 0)
    counts.update(trace.counts())
    return FrequencyTable(counts, seed)


def load_trace_csv(
    path: Union[str, Path], universe: Optional[Iterable[int]] = None
) -> Trace:
    """
    Read one key per line (header optional) in query order.

    When `universe` is given every key must belong to it; otherwise the
    universe is the set of distinct keys in the file.
    """
    path = Path(path)
    allowed = set(universe) if universe is not None else None
    queries = []
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            for line_no, row in enumerate(csv.reader(handle), start=1):
                if not row or not row[0].strip():
                    continue
                if len(row) != 1:
                    raise TraceFileError(
                        path, line_no, f"expected 1 field, got {len(row)}"
                    )
                try:
                    key = int(row[0])
                except ValueError:
                    if line_no == 1:
                        continue
                    raise TraceFileError(
                        path, line_no, f"not an integer key: {row[0]!r}"
                    )
                if key < 0:
                    raise TraceFileError(path, line_no, f"negative key {key}")
                if allowed is not None and key not in allowed:
                    raise TraceFileError(
                        path, line_no, f"key {key} is not in the universe"
                    )
                queries.append(key)
    except OSError as exc:
        raise TraceFileError(path, None, str(exc)) from exc
    if not queries:
        raise TraceFileError(path, None, "trace is empty")
    keys = allowed if allowed is not None else set(queries)
    logger.info(
        "Loaded %d queries over %d keys from %s",
        len(queries),
        len(keys),
        path,
    )
    return Trace(np.array(queries, dtype=np.int64), tuple(sorted(keys)))


def write_trace_csv(
    path: Union[str, Path], queries: Union[Trace, Sequence[int]]
) -> Path:
    path = Path(path)
    if isinstance(queries, Trace):
        queries = queries.queries
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["key"])
        for key in queries:
            writer.writerow([int(key)])
    return path
