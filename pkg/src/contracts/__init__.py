"""Contracts module - configuration schemas, output records, and errors."""

from src.contracts.errors import (
    CheckpointError,
    ConfigError,
    InputError,
    NumericError,
    VisaError,
)
from src.contracts.records import METRICS_HEADER, MetricsRow, MiBenchRow, RunRecord
from src.contracts.schemas import (
    AugmentationSpec,
    AugTag,
    EnvName,
    Method,
    SafeConvention,
    TrainConfig,
)

__all__ = [
    # Errors
    "CheckpointError",
    "ConfigError",
    "InputError",
    "NumericError",
    "VisaError",
    # Records
    "METRICS_HEADER",
    "MetricsRow",
    "MiBenchRow",
    "RunRecord",
    # Schemas
    "AugTag",
    "AugmentationSpec",
    "EnvName",
    "Method",
    "SafeConvention",
    "TrainConfig",
]
