import pytest
from sqlmodel import Session, SQLModel, create_engine

import src.models  # noqa: F401  (registers tables for create_all)
from src.trees import Priority, Treap


@pytest.fixture()
def small_treap():
    """Keys 1..7 with priorities that make 4 the root."""
    priorities = {
        4: Priority(7.0, 0.5),
        2: Priority(6.0, 0.5),
        6: Priority(5.0, 0.5),
        1: Priority(4.0, 0.5),
        3: Priority(3.0, 0.5),
        5: Priority(2.0, 0.5),
        7: Priority(1.0, 0.5),
    }
    return Treap.build((key, key * 10, p) for key, p in priorities.items())


@pytest.fixture()
def session(tmp_path):
    """Provide a fresh SQLite database session for each test."""
    db_path = tmp_path / "history.db"
    engine = create_engine(f"sqlite:///{db_path}", echo=False)
    SQLModel.metadata.create_all(engine)
    with Session(engine) as s:
        try:
            yield s
        finally:
            engine.dispose()
