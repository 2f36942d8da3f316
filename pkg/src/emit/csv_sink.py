"""CSV writers backed by pandas."""

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from src.contracts.errors import ConfigError
from src.contracts.records import METRICS_HEADER, MetricsRow
from src.emit.ports import MetricsSink

logger = logging.getLogger(__name__)

DEFAULT_FLOAT_FORMAT = "%.10g"


def write_frame(
    rows: Sequence[dict[str, Any]],
    path: str | Path,
    columns: Sequence[str],
    float_format: str = DEFAULT_FLOAT_FORMAT,
) -> Path:
    """
    Write ``rows`` with a fixed column order and float format.

    Identical rows always produce identical bytes.
    """
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    try:
        frame.to_csv(out, index=False, float_format=float_format, lineterminator="\n")
    except OSError as e:
        raise ConfigError(f"cannot write {out}: {e}") from e
    logger.debug(f"Wrote {len(frame)} rows to {out}")
    return out


class CsvMetricsSink(MetricsSink):
    """Buffers rows and rewrites the metrics file on every write."""

    def __init__(self, path: str | Path, float_format: str = DEFAULT_FLOAT_FORMAT) -> None:
        """
        Initialize CSV sink.

        Args:
            path: Destination file.
            float_format: printf-style float format.
        """
        self._path = Path(path)
        self._float_format = float_format
        self._rows: list[dict[str, Any]] = []
        self._flush()

    @property
    def path(self) -> Path:
        return self._path

    def write(self, row: MetricsRow) -> None:
        self._rows.append(row.to_csv_dict())
        self._flush()

    def close(self) -> None:
        self._flush()

    def _flush(self) -> None:
        write_frame(self._rows, self._path, METRICS_HEADER, self._float_format)
