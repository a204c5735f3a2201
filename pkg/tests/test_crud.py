import json
import math
from datetime import timezone

import pytest
from sqlmodel import Session, select

from src import crud
from src.models import ExperimentRun, TrialRecord


def _rows(n_trials=2, alpha=1.0):
    return [
        {
            "structure": structure,
            "trial": trial,
            "n": 100,
            "alpha": alpha,
            "m": 1000,
            "oracle": "perfect",
            "comparisons": 5000 + trial,
            "rotations": 0,
            "overhead_ops": 0,
            "ops": 1000,
        }
        for trial in range(n_trials)
        for structure in ("learned_treap", "splay")
    ]


CONFIG = {"oracle": "perfect", "seed": 3, "trials": 2, "n": [100]}


# ---- RECORD ----
def test_record_experiment_stores_run_and_rows(session: Session):
    run = crud.record_experiment(session, "bench synthetic", CONFIG, _rows())
    assert run.id is not None
    assert run.command == "bench synthetic"
    assert run.seed == 3 and run.trials == 2
    assert json.loads(run.config_json) == CONFIG
    assert run.created_at.tzinfo is not None
    assert run.created_at.utcoffset() == timezone.utc.utcoffset(None)

    trials = crud.get_trials_for_run(session, run.id)
    assert len(trials) == 4
    assert [t.structure for t in trials[:2]] == ["learned_treap", "splay"]
    assert trials[-1].comparisons == 5001


def test_nan_alpha_is_stored_as_null(session: Session):
    run = crud.record_experiment(
        session, "bench trace", CONFIG, _rows(1, alpha=math.nan)
    )
    trials = crud.get_trials_for_run(session, run.id)
    assert all(t.alpha is None for t in trials)


def test_record_without_rows(session: Session):
    run = crud.record_experiment(session, "verify theory", {}, [])
    assert run.oracle == "" and run.seed == 0
    assert crud.get_trials_for_run(session, run.id) == []


def test_failed_rows_roll_back_the_run(session: Session):
    rows = _rows()
    del rows[1]["comparisons"]
    with pytest.raises(KeyError):
        crud.record_experiment(session, "bench synthetic", CONFIG, rows)
    assert session.exec(select(ExperimentRun)).all() == []
    assert session.exec(select(TrialRecord)).all() == []


# ---- QUERY ----
def test_get_run_missing(session: Session):
    assert crud.get_run(session, 4242) is None


def test_list_runs_newest_first_with_limit(session: Session):
    ids = [
        crud.record_experiment(session, f"cmd {i}", CONFIG, []).id
        for i in range(3)
    ]
    listed = crud.list_runs(session)
    assert [run.id for run in listed] == list(reversed(ids))
    assert len(crud.list_runs(session, limit=2)) == 2


# ---- DELETE ----
def test_delete_run_cascades(session: Session):
    run = crud.record_experiment(session, "bench synthetic", CONFIG, _rows())
    assert crud.delete_run(session, run.id) is True
    assert crud.get_run(session, run.id) is None
    assert session.exec(select(TrialRecord)).all() == []
    assert session.exec(select(ExperimentRun)).all() == []


def test_delete_missing_run(session: Session):
    assert crud.delete_run(session, 9999) is False
