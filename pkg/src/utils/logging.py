"""Logging setup with a per-run identifier on every record."""

import logging
import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar

from src.config import Settings

# Identifies the training run ("variant/seed_N") that emitted a record
_run_id_var: ContextVar[str] = ContextVar("run_id", default="-")

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(run_id)s | %(name)s | %(message)s"


class RunIdFilter(logging.Filter):
    """Stamp the active run id onto each record."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = _run_id_var.get()
        return True


def configure_logging(settings: Settings | None = None) -> None:
    """
    Route all logging to stderr at the configured level.

    stdout is reserved for command results (paths, success rates).
    """
    level = logging.INFO
    if settings:
        level = getattr(logging, settings.log_level, logging.INFO)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    handler.addFilter(RunIdFilter())

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for existing in root_logger.handlers[:]:
        root_logger.removeHandler(existing)
    root_logger.addHandler(handler)

    logging.getLogger("asyncio").setLevel(logging.WARNING)


def set_run_id(run_id: str) -> None:
    """Set the run id for the current context (thread or task)."""
    _run_id_var.set(run_id)


def get_run_id() -> str:
    return _run_id_var.get()


@contextmanager
def run_scope(run_id: str) -> Iterator[None]:
    """Tag records with ``run_id`` inside the block, restoring the previous id afterwards."""
    token = _run_id_var.set(run_id)
    try:
        yield
    finally:
        _run_id_var.reset(token)


@contextmanager
def latency_log(
    logger: logging.Logger,
    operation: str,
    level: int = logging.INFO,
) -> Iterator[None]:
    """Log how long the block took, or how long it ran before failing."""
    start = time.perf_counter()
    try:
        yield
    except BaseException as e:
        logger.error(f"{operation} failed after {time.perf_counter() - start:.3f}s: {e}")
        raise
    logger.log(level, f"{operation} took {time.perf_counter() - start:.3f}s")
