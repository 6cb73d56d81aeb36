"""
Application configuration
"""

import os

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Project
    PROJECT_NAME: str = "influence-lab"
    VERSION: str = "1.0.0"

    # Logging Configuration
    LOG_LEVEL: str = "INFO"

    # Reproducibility
    DEFAULT_SEED: int = 0

    # Partition guard: a column with more distinct values must be discretized first
    MAX_DISCRETE_LEVELS: int = 64

    # Reports and tabular files
    DELIMITER: str = ","
    REPORT_FLOAT_FORMAT: str = ".10g"

    # Thread pool width for independent evaluations (BDA draws, toy repetitions)
    MAX_WORKERS: int = 1

    # Text pipeline
    MAX_TOKENS: int = 400

    # Neural training
    LOSS_CLAMP: float = 1e-12

    model_config = SettingsConfigDict(
        env_prefix="INFLUENCE_LAB_",
        case_sensitive=True,
        env_file=".env" if os.path.exists(".env") else None,
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
