from typing import List, Optional
from datetime import datetime, timezone
from sqlmodel import SQLModel, Field, Relationship
from sqlalchemy import Column
from sqlalchemy.types import TypeDecorator, String


def _now_utc() -> datetime:
    return datetime.now(timezone.utc)


class TZDateTime(TypeDecorator):
    """Stores tz-aware datetimes as ISO-8601 strings with offset.

    SQLite has no timezone-aware column type, so values round-trip through
    `datetime.isoformat` / `datetime.fromisoformat`. Naive values are
    treated as UTC.
    """

    impl = String(64)
    cache_ok = True

    def process_bind_param(self, value, dialect):
        if value is None:
            return None
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return value.isoformat()

    def process_result_value(self, value, dialect):
        if value is None:
            return None
        return datetime.fromisoformat(value)


class ExperimentRun(SQLModel, table=True):
    id: Optional[int] = Field(default=None, primary_key=True)
    command: str = Field(index=True)
    oracle: str
    seed: int
    trials: int
    config_json: str  # ExperimentConfig.describe() as JSON
    created_at: datetime = Field(
        default_factory=_now_utc,
        sa_column=Column(TZDateTime(), nullable=False),
    )
    trial_records: List["TrialRecord"] = Relationship(
        back_populates="run",
        sa_relationship_kwargs={"cascade": "all, delete-orphan"},
    )


class TrialRecord(SQLModel, table=True):
    id: Optional[int] = Field(default=None, primary_key=True)
    run_id: int = Field(foreign_key="experimentrun.id", index=True)
    structure: str = Field(index=True)
    trial: int
    n: int
    alpha: Optional[float] = None  # None for trace replays
    m: int
    oracle: str
    comparisons: int
    rotations: int
    overhead_ops: int
    ops: int
    run: Optional[ExperimentRun] = Relationship(
        back_populates="trial_records"
    )
