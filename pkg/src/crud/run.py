import json
import logging
import math
from typing import Iterable, List, Optional

from sqlmodel import Session, select

from src.models import ExperimentRun, TrialRecord
from .base import _fetch, _persist_with_children, _remove

logger = logging.getLogger(__name__)


def _trial_records(run_id: int, rows: Iterable[dict]) -> List[TrialRecord]:
    records = []
    for row in rows:
        alpha = row["alpha"]
        records.append(
            TrialRecord(
                run_id=run_id,
                structure=row["structure"],
                trial=int(row["trial"]),
                n=int(row["n"]),
                alpha=None if alpha is None or math.isnan(alpha) else alpha,
                m=int(row["m"]),
                oracle=row["oracle"],
                comparisons=int(row["comparisons"]),
                rotations=int(row["rotations"]),
                overhead_ops=int(row["overhead_ops"]),
                ops=int(row["ops"]),
            )
        )
    return records


def record_experiment(
    session: Session,
    command: str,
    config: dict,
    rows: Iterable[dict],
) -> ExperimentRun:
    """
    Store one benchmark invocation and its per-trial rows.

    Parameters:
        command (str): CLI subcommand, e.g. "bench synthetic".
        config (dict): JSON-serializable description of the run.
        rows (Iterable[dict]): per-trial result rows (aggregates excluded).

    Returns:
        ExperimentRun: the persisted run with its `id` populated.
    """
    run = ExperimentRun(
        command=command,
        oracle=str(config.get("oracle", "")),
        seed=int(config.get("seed", 0)),
        trials=int(config.get("trials", 0)),
        config_json=json.dumps(config, sort_keys=True),
    )
    rows = list(rows)
    records = _persist_with_children(
        session, run, lambda run_id: _trial_records(run_id, rows)
    )
    logger.info(
        "Recorded run %s (%s) with %d trial rows",
        run.id,
        command,
        len(records),
    )
    return run


def get_run(session: Session, run_id: int) -> Optional[ExperimentRun]:
    return _fetch(session, ExperimentRun, run_id)


def list_runs(session: Session, limit: int = 20) -> List[ExperimentRun]:
    """Most recent runs first."""
    statement = (
        select(ExperimentRun)
        .order_by(ExperimentRun.created_at.desc(), ExperimentRun.id.desc())
        .limit(limit)
    )
    return list(session.exec(statement).all())


def get_trials_for_run(session: Session, run_id: int) -> List[TrialRecord]:
    logger.debug("Fetching trial rows for run %s", run_id)
    statement = (
        select(TrialRecord)
        .where(TrialRecord.run_id == run_id)
        .order_by(TrialRecord.id)
    )
    return list(session.exec(statement).all())


def delete_run(session: Session, run_id: int) -> bool:
    logger.info("Deleting run %s", run_id)
    return _remove(session, ExperimentRun, run_id)
