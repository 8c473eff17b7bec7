"""
Ambient settings read from the environment or a .env file.

Variables use the BBFRICTION_ prefix, e.g. BBFRICTION_LOG_LEVEL=DEBUG.
Run-specific physics lives in the YAML run config, not here.
"""

import logging
from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


class FrictionSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="BBFRICTION_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"
    quad_rel_tol: Optional[float] = Field(default=None, gt=0)
    sweep_workers: int = Field(default=1, ge=1)
    show_progress: bool = False


_settings: Optional[FrictionSettings] = None


def get_settings() -> FrictionSettings:
    """Get or create the process-wide settings object."""
    global _settings
    if _settings is None:
        _settings = FrictionSettings()
    return _settings


def reset_settings() -> None:
    """Forget cached settings so the next get_settings() re-reads the environment."""
    global _settings
    _settings = None


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging on stderr with the project format.

    Args:
        level: Level name; defaults to the configured BBFRICTION_LOG_LEVEL
    """
    level_name = (level or get_settings().log_level).upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.INFO), format=LOG_FORMAT, force=True)
