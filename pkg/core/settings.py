import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError

from core.custom_logging import logger

# Environment variable -> Settings field
ENV_OVERRIDES: Dict[str, str] = {
    "UNIQCUBE_MAX_K": "max_dimension",
    "UNIQCUBE_THREADS": "threads",
    "UNIQCUBE_U_MAX_K": "u_max_k",
    "UNIQCUBE_G_MAX_K": "g_max_k",
    "UNIQCUBE_MAX_CANDIDATES": "max_candidates",
    "UNIQCUBE_MAX_NODES": "max_nodes",
    "UNIQCUBE_WALL_CLOCK": "wall_clock_seconds",
    "UNIQCUBE_CANONICAL_MAX_K": "canonical_max_k",
}


class Settings(BaseModel):
    """Runtime limits and worker configuration."""

    max_dimension: int = Field(default=24, ge=1, le=30)
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    u_max_k: int = Field(default=4, ge=1)
    g_max_k: int = Field(default=6, ge=1)
    canonical_max_k: int = Field(default=6, ge=1)
    max_candidates: int = Field(default=200_000, ge=1)
    max_nodes: int = Field(default=5_000_000, ge=1)
    wall_clock_seconds: float = Field(default=600.0, gt=0)
    max_pivots: int = Field(default=100_000, ge=1)


def load_settings(config_path: Optional[str] = None, environ: Optional[Dict[str, str]] = None) -> Settings:
    """
    Builds a Settings object from an optional YAML file and environment overrides.

    Args:
        config_path (Optional[str]): YAML file with Settings fields. Defaults to $UNIQCUBE_CONFIG.
        environ (Optional[Dict[str, str]]): Environment mapping, os.environ when omitted.

    Returns:
        Settings: The validated settings.

    Raises:
        ValueError: If the file or an override does not validate.
    """
    environ = os.environ if environ is None else environ
    values: Dict[str, Any] = {}
    config_path = config_path or environ.get("UNIQCUBE_CONFIG")
    if config_path:
        try:
            values.update(yaml.safe_load(Path(config_path).read_text(encoding="utf-8")) or {})
        except (OSError, yaml.YAMLError) as e:
            logger.warning(f"Could not read settings file '{config_path}': {e}")
            raise ValueError(f"Invalid settings file '{config_path}': {e}") from e
    for variable, field in ENV_OVERRIDES.items():
        if environ.get(variable):
            values[field] = environ[variable]
    try:
        return Settings(**values)
    except ValidationError as e:
        raise ValueError(f"Invalid uniqcube settings: {e}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings, read once."""
    return load_settings()
