"""
Result tables for benchmark runs, backed by pandas.

Per-trial rows are kept as a DataFrame in the order the runner produced
them (n, trial, structure); aggregate rows carry trial="mean" or "sem".
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

COLUMNS = [
    "structure",
    "trial",
    "n",
    "alpha",
    "m",
    "oracle",
    "comparisons",
    "rotations",
    "overhead_ops",
    "ops",
    "analytic_expected",
    "analytic_lower_bound",
]
GROUP_COLUMNS = ["structure", "n", "alpha", "m", "oracle"]
VALUE_COLUMNS = [
    "comparisons",
    "rotations",
    "overhead_ops",
    "ops",
    "analytic_expected",
    "analytic_lower_bound",
]
FLOAT_FORMAT = "%.12g"


class ExperimentResult:
    """
    Totals per (structure, trial) plus mean / standard-error aggregates.

    Parameters:
        rows: dicts keyed by the CSV header names.
    """

    def __init__(self, rows: Iterable[dict]):
        self.trials = pd.DataFrame(list(rows), columns=COLUMNS)

    def __len__(self) -> int:
        return len(self.trials)

    @property
    def structures(self) -> List[str]:
        return list(dict.fromkeys(self.trials["structure"]))

    def aggregate(self) -> pd.DataFrame:
        grouped = self.trials.groupby(
            GROUP_COLUMNS, sort=False, dropna=False
        )[VALUE_COLUMNS]
        mean = grouped.mean().reset_index().assign(trial="mean")
        sem = grouped.sem().reset_index().assign(trial="sem")
        return pd.concat([mean, sem], ignore_index=True)[COLUMNS]

    def to_frame(self) -> pd.DataFrame:
        return pd.concat(
            [self.trials.astype({"trial": object}), self.aggregate()],
            ignore_index=True,
        )

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info("Wrote %d result rows to %s", len(self.trials), path)
        return path

    def _rows(self, structure: str, n: Optional[int]) -> pd.DataFrame:
        rows = self.trials[self.trials["structure"] == structure]
        if n is not None:
            rows = rows[rows["n"] == n]
        if rows.empty:
            raise KeyError(f"No rows for structure {structure!r}")
        return rows

    def per_access(
        self, structure: str, n: Optional[int] = None
    ) -> np.ndarray:
        """Per-trial mean comparisons per access."""
        rows = self._rows(structure, n)
        return (rows["comparisons"] / rows["ops"]).to_numpy(dtype=float)

    def mean_cost(self, structure: str, n: Optional[int] = None) -> float:
        return float(np.mean(self.per_access(structure, n)))

    def sem_cost(self, structure: str, n: Optional[int] = None) -> float:
        values = self.per_access(structure, n)
        if values.size < 2:
            return float("nan")
        return float(np.std(values, ddof=1) / np.sqrt(values.size))

    def analytic_per_access(
        self, structure: str, n: Optional[int] = None
    ) -> float:
        rows = self._rows(structure, n)
        return float((rows["analytic_expected"] / rows["m"]).mean())


@dataclass
class SweepResult:
    """One ExperimentResult per swept parameter value."""

    parameter: str
    results: Dict[float, ExperimentResult] = field(default_factory=dict)

    def mean_costs(self, structure: str) -> Dict[float, float]:
        return {
            value: result.mean_cost(structure)
            for value, result in self.results.items()
        }

    def is_monotone(self, structure: str) -> bool:
        """True when mean cost never decreases as the parameter grows."""
        costs = [
            cost for _, cost in sorted(self.mean_costs(structure).items())
        ]
        return all(a <= b for a, b in zip(costs, costs[1:]))

    def savings(self, structure: str, baseline: str) -> Dict[float, float]:
        """1 - cost(structure) / cost(baseline) per parameter value."""
        return {
            value: 1.0
            - result.mean_cost(structure) / result.mean_cost(baseline)
            for value, result in self.results.items()
        }

    def to_frame(self) -> pd.DataFrame:
        frames = [result.to_frame() for result in self.results.values()]
        return pd.concat(frames, ignore_index=True)

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info(
            "Wrote %s sweep over %d values to %s",
            self.parameter,
            len(self.results),
            path,
        )
        return path
