import logging
from typing import Callable, List, Optional, Sequence, Type, TypeVar

from sqlmodel import Session, SQLModel

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=SQLModel)
ChildT = TypeVar("ChildT", bound=SQLModel)


def _persist_with_children(
    session: Session,
    parent: ModelT,
    make_children: Callable[[int], Sequence[ChildT]],
) -> List[ChildT]:
    """
    Write `parent` and the rows built from its id in one transaction.

    The parent is flushed to obtain its primary key, `make_children(id)`
    builds the dependent rows, and a single commit stores both. If
    anything fails the session is rolled back, so a run is never left
    without its trial rows.

    Returns:
        List[ChildT]: the children, refreshed; `parent` is refreshed too.
    """
    try:
        session.add(parent)
        session.flush()
        children = list(make_children(parent.id))
        session.add_all(children)
        session.commit()
    except Exception:
        session.rollback()
        logger.exception("Rolled back write of %s", type(parent).__name__)
        raise
    session.refresh(parent)
    for child in children:
        session.refresh(child)
    return children


def _fetch(
    session: Session, model: Type[ModelT], obj_id: int
) -> Optional[ModelT]:
    return session.get(model, obj_id)


def _remove(session: Session, model: Type[ModelT], obj_id: int) -> bool:
    """Delete by primary key; False when no such row exists."""
    obj = session.get(model, obj_id)
    if obj is None:
        return False
    session.delete(obj)
    session.commit()
    return True
