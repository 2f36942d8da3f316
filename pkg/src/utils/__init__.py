"""Utility modules."""

from src.utils.config_loader import (
    build_train_config,
    dump_train_config,
    load_config_file,
    parse_config_text,
    parse_overrides,
)
from src.utils.logging import configure_logging, latency_log, run_scope, set_run_id
from src.utils.preset_loader import PresetLoader, PresetTable, VariantPreset

__all__ = [
    "build_train_config",
    "configure_logging",
    "dump_train_config",
    "latency_log",
    "load_config_file",
    "parse_config_text",
    "parse_overrides",
    "run_scope",
    "set_run_id",
    "PresetLoader",
    "PresetTable",
    "VariantPreset",
]
