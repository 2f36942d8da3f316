"""Emit module - metrics writers and checkpoints."""

from src.emit.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from src.emit.csv_sink import CsvMetricsSink, write_frame
from src.emit.ports import MemoryMetricsSink, MetricsSink

__all__ = [
    # Ports
    "MemoryMetricsSink",
    "MetricsSink",
    # Adapters
    "CsvMetricsSink",
    "write_frame",
    # Checkpoints
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
]
