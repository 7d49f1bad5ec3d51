import logging
import os
from typing import Any, Literal, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config/framekit.config.yaml"


class Settings(BaseModel):
    """Numeric defaults shared by the CLI and the batch drivers."""

    tolerance: float = Field(default=1e-9, gt=0)
    strict_margin: float = Field(default=1e-12, gt=0)
    oracle_tolerance: float = Field(default=1e-6, gt=0)
    oracle_threshold: float = Field(default=1e-9, gt=0)
    oracle_max_iter: int = Field(default=10_000, ge=1)
    oracle_step_tol: float = Field(default=1e-12, gt=0)
    default_format: Literal["structured", "dsv"] = "structured"
    batch_workers: int = Field(default=4, ge=1)


def _load_config(path: Optional[str] = None) -> dict[str, Any]:
    """Loads the `framekit` section of the YAML config; missing files yield {}."""
    config_path = path or os.getenv("FRAMEKIT_CONFIG_PATH", DEFAULT_CONFIG_PATH)
    if not os.path.exists(config_path):
        # running from src/ or tests/
        if os.path.exists(os.path.join("..", DEFAULT_CONFIG_PATH)):
            config_path = os.path.join("..", DEFAULT_CONFIG_PATH)

    if not os.path.exists(config_path):
        logger.warning(f"Config file not found at {config_path}, using defaults")
        return {}
    try:
        with open(config_path, "r") as f:
            config = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        logger.warning(f"Error loading config from {config_path}: {e}")
        return {}
    return config.get("framekit", {}) or {}


def load_settings(path: Optional[str] = None, tolerance: Optional[float] = None) -> Settings:
    """
    Priority: explicit argument > env FRAMEKIT_TOL > config file > default.
    """
    values = _load_config(path)
    env_tol = os.getenv("FRAMEKIT_TOL")
    if env_tol:
        try:
            values["tolerance"] = float(env_tol)
        except ValueError:
            logger.warning(f"Ignoring non-numeric FRAMEKIT_TOL={env_tol!r}")
    if tolerance is not None:
        values["tolerance"] = tolerance

    try:
        return Settings(**values)
    except ValidationError as e:
        logger.warning(f"Invalid settings, falling back to defaults: {e}")
        return Settings()
