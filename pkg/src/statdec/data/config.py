import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from statdec.errors import ParameterError
from statdec.models.training import DATASET_PRESETS, TrainConfig

logger = logging.getLogger(__name__)


class StatDECSettings(BaseSettings):
    """Process-level settings.

    Automatically loads from environment variables and .env file.
    """

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    threads: int | None = Field(default=None, ge=1, alias="STATDEC_THREADS")
    log_level: str = Field(default="INFO", alias="STATDEC_LOG_LEVEL")
    output_dir: Path = Field(default=Path("runs"), alias="STATDEC_OUTPUT_DIR")


@lru_cache
def get_settings() -> StatDECSettings:
    """Get process settings (cached singleton).

    Returns:
        StatDECSettings with values from .env file or environment variables.
    """
    return StatDECSettings()


def load_train_config(
    config_path: Path | None = None,
    preset: str | None = None,
    overrides: dict[str, Any] | None = None,
) -> TrainConfig:
    """Resolve the effective training config.

    Precedence: overrides (CLI flags) > JSON file > dataset preset > defaults.
    Nested `ablation` keys are merged rather than replaced.

    Raises:
        FileNotFoundError: If config_path does not exist.
        ParameterError: If the preset name is unknown.
        pydantic.ValidationError: If the merged values are invalid.
    """
    values: dict[str, Any] = {}
    if preset is not None:
        if preset not in DATASET_PRESETS:
            raise ParameterError(
                f"unknown preset {preset!r}; choose from {', '.join(sorted(DATASET_PRESETS))}"
            )
        values.update(DATASET_PRESETS[preset])
    if config_path is not None:
        config_path = Path(config_path)
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")
        _merge(values, json.loads(config_path.read_text(encoding="utf-8")))
    if overrides:
        _merge(values, {key: value for key, value in overrides.items() if value is not None})

    config = TrainConfig.model_validate(values)
    logger.debug(f"Effective config: {config.model_dump(by_alias=True)}")
    return config


def _merge(base: dict[str, Any], update: dict[str, Any]) -> None:
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
