import logging
from contextlib import contextmanager
from urllib.parse import urlparse, urlunparse

from sqlalchemy import event
from sqlalchemy.engine import Engine
from sqlmodel import Session, SQLModel, create_engine

logger = logging.getLogger(__name__)


def _sanitize_database_url(raw: str) -> str:
    """Return a database URL safe to log (no user info, query or params).

    SQLite file paths are kept as-is.
    """
    try:
        p = urlparse(raw)
    except Exception:
        return "<invalid-database-url>"

    scheme = p.scheme or ""
    if scheme.startswith("sqlite"):
        if p.path:
            return f"{scheme}://{p.path}"
        return scheme

    host = p.hostname or ""
    port = f":{p.port}" if p.port else ""
    return urlunparse((scheme, f"{host}{port}", p.path or "", "", "", ""))


def _set_sqlite_pragma(dbapi_connection, connection_record):
    cursor = dbapi_connection.cursor()
    cursor.execute("PRAGMA foreign_keys=ON")
    cursor.close()


def get_engine(url: str, echo: bool = False) -> Engine:
    """
    Create an engine for the run-history database.

    SQLite connections get foreign keys enabled on every connect.
    """
    logger.info("Using results database at: %s", _sanitize_database_url(url))
    connect_args = {}
    if url.startswith("sqlite"):
        connect_args["check_same_thread"] = False
    engine = create_engine(url, echo=echo, connect_args=connect_args)
    if url.startswith("sqlite"):
        try:
            event.listen(engine, "connect", _set_sqlite_pragma)
        except Exception:
            logger.exception(
                "Could not register connect listener; "
                "continuing without PRAGMA setup"
            )
    return engine


def init_db(engine: Engine) -> None:
    # Import models so their tables are registered before create_all.
    from . import models  # noqa: F401

    logger.debug("Metadata tables: %s", SQLModel.metadata.tables.keys())
    SQLModel.metadata.create_all(engine)


@contextmanager
def get_session(engine: Engine):
    """
    Provide a SQLModel Session bound to `engine`, closed on exit.
    """
    with Session(engine) as session:
        yield session
