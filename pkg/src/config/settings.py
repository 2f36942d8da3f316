"""Process settings using pydantic-settings."""

from functools import lru_cache
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from VISA_* environment variables or a .env file."""

    model_config = SettingsConfigDict(
        env_prefix="VISA_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO",
        description="Logging level",
    )

    # Paths
    output_dir: str = Field(
        default="./runs",
        description="Default directory for run outputs",
    )
    presets_dir: str = Field(
        default="./presets",
        description="Directory containing preset YAML files",
    )

    # Ablation
    max_workers: int = Field(
        default=1,
        ge=1,
        description="Worker processes for ablation runs",
    )

    # Output
    float_format: str = Field(
        default="%.10g",
        description="printf-style float format for CSV writers",
    )

    @field_validator("output_dir", "presets_dir")
    @classmethod
    def strip_trailing_slash(cls, v: str) -> str:
        """Remove trailing slash from directory paths."""
        return v.rstrip("/") or "/"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
