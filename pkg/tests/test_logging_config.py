import logging

from src.logging_config import setup_logging


def test_setup_logging_levels():
    setup_logging("debug")
    assert logging.getLogger().level == logging.DEBUG
    assert logging.getLogger("sqlalchemy.engine").level == logging.WARNING

    setup_logging("not-a-level")
    assert logging.getLogger().level == logging.INFO

    setup_logging(logging.WARNING)
    assert logging.getLogger().level == logging.WARNING
    setup_logging()
