"""Port definitions for emit operations."""

from abc import ABC, abstractmethod

from src.contracts.records import MetricsRow


class MetricsSink(ABC):
    """Port for persisting evaluation-interval metrics."""

    @abstractmethod
    def write(self, row: MetricsRow) -> None:
        """
        Record one metrics row.

        Args:
            row: Metrics for one evaluation interval.
        """
        ...

    @abstractmethod
    def close(self) -> None:
        """Flush and release any underlying resource."""
        ...

    def __enter__(self) -> "MetricsSink":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


class MemoryMetricsSink(MetricsSink):
    """Keeps rows in memory."""

    def __init__(self) -> None:
        self.rows: list[MetricsRow] = []
        self.closed = False

    def write(self, row: MetricsRow) -> None:
        self.rows.append(row)

    def close(self) -> None:
        self.closed = True
