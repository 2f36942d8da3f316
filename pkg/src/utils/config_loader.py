"""Flat ``key = value`` experiment config files."""

import logging
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.contracts.errors import ConfigError
from src.contracts.schemas import TrainConfig

logger = logging.getLogger(__name__)

_NULLS = {"", "none", "null"}


def parse_config_text(text: str, source: str = "<string>") -> dict[str, str]:
    """
    Parse one ``key = value`` pair per line; ``#`` starts a comment.

    Raises:
        ConfigError: On a line without ``=``, an empty key, or a duplicate key.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config_file(path: str | Path) -> dict[str, str]:
    """Read and parse a config file."""
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {file_path}: {e}") from e
    values = parse_config_text(text, str(file_path))
    logger.debug(f"Loaded {len(values)} keys from {file_path}")
    return values


def parse_overrides(pairs: Iterable[str]) -> dict[str, str]:
    """Parse ``--set key=value`` arguments."""
    out: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, value = (part.strip() for part in pair.split("=", 1))
        out[key] = value
    return out


def build_train_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> TrainConfig:
    """
    File values first, then ``overrides`` (CLI flags win).

    Raises:
        ConfigError: Unknown keys or failed validation.
    """
    data: dict[str, Any] = dict(load_config_file(path)) if path is not None else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    unknown = sorted(set(data) - set(TrainConfig.model_fields))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    for key, value in list(data.items()):
        if isinstance(value, str) and value.lower() in _NULLS:
            data[key] = None

    try:
        return TrainConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def dump_train_config(config: TrainConfig) -> str:
    """Render ``config`` back to the flat file format."""
    lines = []
    for key, value in config.model_dump(mode="json").items():
        if isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, list):
            value = ",".join(str(v) for v in value)
        elif value is None:
            value = "none"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
