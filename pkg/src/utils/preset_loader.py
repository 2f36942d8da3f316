"""Preset loading for ablation and sweep variant tables."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from src.contracts.errors import ConfigError
from src.contracts.schemas import AugTag, Method, TrainConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariantPreset:
    """One named training variant: a method, an augmentation tag, and extra overrides."""

    name: str
    method: Method
    aug: AugTag
    description: str = ""
    overrides: dict[str, Any] = field(default_factory=dict)

    def apply(self, base: TrainConfig) -> TrainConfig:
        """
        Return ``base`` with this variant's method, aug and overrides.

        Raises:
            ConfigError: If the combination fails validation.
        """
        data = base.model_dump()
        data.update(self.overrides)
        data["method"] = self.method
        data["aug"] = self.aug
        try:
            return TrainConfig.model_validate(data)
        except ValueError as e:
            raise ConfigError(f"variant {self.name!r} is invalid: {e}") from e


@dataclass
class PresetTable:
    """Loaded and parsed preset file."""

    name: str
    version: str
    description: str
    variants: dict[str, VariantPreset] = field(default_factory=dict)

    def select(self, names: list[str]) -> list[VariantPreset]:
        """
        Variants in the requested order.

        Raises:
            ConfigError: If a name is not in the table.
        """
        missing = [n for n in names if n not in self.variants]
        if missing:
            raise ConfigError(
                f"unknown variants {missing} in preset {self.name!r}; "
                f"known: {sorted(self.variants)}"
            )
        return [self.variants[n] for n in names]


class PresetLoader:
    """Loads and caches preset tables from YAML files."""

    def __init__(self, presets_dir: str | Path) -> None:
        """
        Initialize preset loader.

        Args:
            presets_dir: Directory containing preset YAML files.
        """
        self._presets_dir = Path(presets_dir)
        self._cache: dict[str, PresetTable] = {}

    def load(self, name: str) -> PresetTable:
        """
        Load a preset table by name.

        Args:
            name: Preset name (without .yaml extension).

        Returns:
            Loaded preset table.

        Raises:
            ConfigError: If the file is missing or invalid.
        """
        if name in self._cache:
            return self._cache[name]

        file_path = self._presets_dir / f"{name}.yaml"
        if not file_path.exists():
            file_path = self._presets_dir / f"{name}.yml"
        if not file_path.exists():
            raise ConfigError(f"Preset file not found: {name} (in {self._presets_dir})")

        try:
            with open(file_path, encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in preset file {name}: {e}") from e

        variants: dict[str, VariantPreset] = {}
        for variant_name, spec in (data.get("variants") or {}).items():
            try:
                variants[variant_name] = VariantPreset(
                    name=variant_name,
                    method=Method(spec["method"]),
                    aug=AugTag(spec.get("aug", "none")),
                    description=spec.get("description", ""),
                    overrides=dict(spec.get("overrides") or {}),
                )
            except (KeyError, ValueError, TypeError) as e:
                raise ConfigError(f"Invalid variant {variant_name!r} in preset {name}: {e}") from e

        table = PresetTable(
            name=name,
            version=str(data.get("version", "0.0.0")),
            description=data.get("description", ""),
            variants=variants,
        )
        self._cache[name] = table
        logger.debug(f"Loaded preset table: {name} v{table.version} ({len(variants)} variants)")
        return table

    def clear_cache(self) -> None:
        """Clear the preset cache."""
        self._cache.clear()
