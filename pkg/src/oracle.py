"""
Priority oracles: policies that turn a frequency table into treap
priorities.

Every oracle returns primaries in rank order and reuses the table's
per-key tiebreak draw, so two oracles that agree on primaries (for example
Perfect and a File oracle holding the true counts) build identical treaps.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from src.trees.base import Priority

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


class OracleError(ValueError):
    """Base exception for oracle configuration and prediction errors."""

    pass


class InvalidOracleParameter(OracleError):
    """Raised for out-of-range oracle parameters or unparseable specs."""

    pass


class MissingPredictionError(OracleError):
    """Raised when a prediction file has no entry for some keys."""

    def __init__(self, keys: Sequence[int]):
        self.keys = list(keys)
        shown = ", ".join(str(k) for k in self.keys[:10])
        more = "" if len(self.keys) <= 10 else f" (+{len(self.keys) - 10})"
        super().__init__(f"No prediction for keys: {shown}{more}")


class PredictionFileError(OracleError):
    """Raised for unreadable or malformed prediction files."""

    def __init__(self, path: Path, line: Optional[int], message: str):
        self.path = Path(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{where}: {message}")


class FrequencyTable:
    """
    Ground-truth access counts with a rank order.

    Keys are kept in rank order (index 0 holds the most frequent key).
    Equal frequencies are ordered by a seeded uniform tiebreak, higher
    tiebreak first, and that same draw is what the oracles use as the
    priority tiebreak.

    Attributes:
        keys (tuple): keys in rank order.
        freqs (np.ndarray): frequencies in rank order (non-increasing).
        tiebreak (np.ndarray): per-key tiebreak draws in rank order.
        m (float): total of all frequencies.
    """

    def __init__(
        self,
        counts: Mapping[int, float],
        seed: SeedLike = None,
    ):
        if not counts:
            raise OracleError("Frequency table needs at least one key")
        rng = np.random.default_rng(seed)
        keys = sorted(counts)
        freqs = np.array([counts[k] for k in keys], dtype=float)
        if np.any(freqs < 0):
            raise OracleError("Frequencies must be non-negative")
        draws = rng.random(len(keys))
        # lexsort keys on the last column first: frequency, then tiebreak.
        order = np.lexsort((-draws, -freqs))
        self.keys = tuple(int(keys[i]) for i in order)
        self.freqs = freqs[order]
        self.tiebreak = draws[order]
        self.m = float(self.freqs.sum())
        self._rank = {key: index + 1 for index, key in enumerate(self.keys)}

    @property
    def n(self) -> int:
        return len(self.keys)

    @property
    def probabilities(self) -> np.ndarray:
        return self.freqs / self.m

    def rank(self, key: int) -> int:
        return self._rank[key]

    def frequency(self, key: int) -> float:
        return float(self.freqs[self._rank[key] - 1])

    def __contains__(self, key: int) -> bool:
        return key in self._rank

    def __len__(self) -> int:
        return len(self.keys)

    def as_dict(self) -> Dict[int, float]:
        return {k: float(f) for k, f in zip(self.keys, self.freqs)}

    def top_mass(self, k: int) -> float:
        """Probability mass of the k most frequent keys."""
        return float(self.freqs[:k].sum() / self.m)


# --- Oracle kinds ---


@dataclass(frozen=True)
class Perfect:
    label = "perfect"

    def primaries(self, table: FrequencyTable, rng) -> np.ndarray:
        return table.freqs.astype(float)


@dataclass(frozen=True)
class NoisyRank:
    """Predicted rank drawn uniformly from [r, floor(eps * r + delta)]."""

    eps: float
    delta: float

    def __post_init__(self):
        if self.eps < 1 or self.delta < 1:
            raise InvalidOracleParameter(
                f"noisy oracle needs eps >= 1 and delta >= 1, "
                f"got eps={self.eps}, delta={self.delta}"
            )

    @property
    def label(self) -> str:
        return f"noisy:{self.eps:g},{self.delta:g}"

    def predicted_ranks(self, table: FrequencyTable, rng) -> np.ndarray:
        ranks = np.arange(1, table.n + 1)
        upper = np.floor(self.eps * ranks + self.delta).astype(np.int64)
        return rng.integers(ranks, upper, endpoint=True)

    def primaries(self, table: FrequencyTable, rng) -> np.ndarray:
        return -self.predicted_ranks(table, rng).astype(float)


@dataclass(frozen=True)
class MultiplicativeFreq:
    """Predicted frequency log-uniform in [f / delta, f * delta]."""

    delta: float

    def __post_init__(self):
        if self.delta < 1:
            raise InvalidOracleParameter(
                f"multiplicative oracle needs delta >= 1, got {self.delta}"
            )

    @property
    def label(self) -> str:
        return f"mult:{self.delta:g}"

    def primaries(self, table: FrequencyTable, rng) -> np.ndarray:
        # One exponent per key in rank order, scaled by ln(delta): the
        # same seed gives nested error levels across a delta sweep.
        exponents = rng.uniform(-1.0, 1.0, table.n)
        freqs = table.freqs.astype(float)
        predicted = freqs * np.exp(exponents * math.log(self.delta))
        return np.clip(predicted, freqs / self.delta, freqs * self.delta)


@dataclass(frozen=True)
class TopK:
    """
    Only the k most frequent keys are known.

    Top keys get random positive priorities (or their true frequency when
    `frequencies` is set); every other key gets a random negative one.
    """

    k: int
    frequencies: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise InvalidOracleParameter(f"top-k needs k >= 1, got {self.k}")

    @property
    def label(self) -> str:
        prefix = "topkfreq" if self.frequencies else "topk"
        return f"{prefix}:{self.k}"

    def primaries(self, table: FrequencyTable, rng) -> np.ndarray:
        k = min(self.k, table.n)
        # 1 - U keeps the draws inside (0, 1].
        positive = 1.0 - rng.random(table.n)
        values = -positive
        if self.frequencies:
            values[:k] = table.freqs[:k]
        else:
            values[:k] = positive[:k]
        return values


@dataclass(frozen=True)
class RandomOracle:
    label = "random"

    def primaries(self, table: FrequencyTable, rng) -> np.ndarray:
        return rng.random(table.n)


@dataclass(frozen=True)
class FileOracle:
    path: Path
    predictions: Optional[Mapping[int, float]] = field(
        default=None, compare=False, repr=False
    )

    @property
    def label(self) -> str:
        return f"file:{self.path}"

    def load(self) -> Mapping[int, float]:
        if self.predictions is not None:
            return self.predictions
        return load_prediction_file(self.path)

    def primaries(self, table: FrequencyTable, rng) -> np.ndarray:
        predictions = self.load()
        missing = [key for key in table.keys if key not in predictions]
        if missing:
            raise MissingPredictionError(sorted(missing))
        extra = len(predictions) - table.n
        if extra > 0:
            logger.warning(
                "Prediction file %s has %d keys outside the key universe",
                self.path,
                extra,
            )
        return np.array([predictions[k] for k in table.keys], dtype=float)


OracleKind = Union[
    Perfect, NoisyRank, MultiplicativeFreq, TopK, RandomOracle, FileOracle
]


def assign_priorities(
    kind: OracleKind, table: FrequencyTable, seed: SeedLike = None
) -> Dict[int, Priority]:
    """
    Map every key in `table` to a treap priority under `kind`.

    Parameters:
        kind: oracle policy instance.
        table (FrequencyTable): ground-truth counts and tiebreaks.
        seed: anything `numpy.random.default_rng` accepts; identical
            (kind, table, seed) give identical maps.

    Returns:
        Dict[int, Priority]: key -> Priority(primary, tiebreak).
    """
    rng = np.random.default_rng(seed)
    primaries = kind.primaries(table, rng)
    return {
        key: Priority(float(primary), float(tiebreak))
        for key, primary, tiebreak in zip(
            table.keys, primaries, table.tiebreak
        )
    }


def rank_error_from_delta(delta: float) -> float:
    """Rank error implied by a delta-accurate frequency oracle on Zipf."""
    if delta < 1:
        raise InvalidOracleParameter(f"delta must be >= 1, got {delta}")
    return delta**2


def parse_oracle(text: str) -> OracleKind:
    """
    Parse a command-line oracle spec.

    Accepted forms: perfect, random, noisy:EPS,DELTA, mult:DELTA, topk:K,
    topkfreq:K, file:PATH.
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    try:
        if name == "perfect" and not arg:
            return Perfect()
        if name == "random" and not arg:
            return RandomOracle()
        if name == "noisy":
            eps, delta = (float(part) for part in arg.split(","))
            return NoisyRank(eps, delta)
        if name == "mult":
            return MultiplicativeFreq(float(arg))
        if name in ("topk", "topkfreq"):
            return TopK(int(arg), frequencies=name == "topkfreq")
        if name == "file" and arg:
            return FileOracle(Path(arg))
    except ValueError as exc:
        if isinstance(exc, InvalidOracleParameter):
            raise
        raise InvalidOracleParameter(
            f"Malformed oracle spec {text!r}: {exc}"
        ) from exc
    raise InvalidOracleParameter(f"Unknown oracle spec {text!r}")


def _is_header(row: Sequence[str]) -> bool:
    try:
        int(row[0])
    except (ValueError, IndexError):
        return True
    return False


def load_prediction_file(path: Union[str, Path]) -> Dict[int, float]:
    """
    Read `key,predicted_frequency` rows (header optional).

    Raises:
        PredictionFileError: unreadable file, malformed row or duplicate
            key; the error carries the one-based line number.
    """
    path = Path(path)
    predictions: Dict[int, float] = {}
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            for line_no, row in enumerate(csv.reader(handle), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if line_no == 1 and _is_header(row):
                    continue
                if len(row) != 2:
                    raise PredictionFileError(
                        path, line_no, f"expected 2 fields, got {len(row)}"
                    )
                try:
                    key = int(row[0])
                    value = float(row[1])
                except ValueError as exc:
                    raise PredictionFileError(path, line_no, str(exc))
                if key < 0:
                    raise PredictionFileError(
                        path, line_no, f"negative key {key}"
                    )
                if key in predictions:
                    raise PredictionFileError(
                        path, line_no, f"duplicate key {key}"
                    )
                predictions[key] = value
    except OSError as exc:
        raise PredictionFileError(path, None, str(exc)) from exc
    logger.debug("Loaded %d predictions from %s", len(predictions), path)
    return predictions


def write_prediction_file(
    path: Union[str, Path], predictions: Iterable
) -> Path:
    """Write (key, frequency) pairs or a mapping as a prediction CSV."""
    path = Path(path)
    if isinstance(predictions, Mapping):
        predictions = predictions.items()
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["key", "predicted_frequency"])
        for key, value in predictions:
            writer.writerow([int(key), repr(float(value))])
    return path
