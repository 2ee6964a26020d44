"""Application configuration using pydantic-settings."""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from FORKCHECK_* environment variables / .env file."""

    model_config = SettingsConfigDict(
        env_prefix="FORKCHECK_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Default search budget
    max_ops: int = 64
    max_extensions: int = 4096
    max_nodes: int = 2_000_000

    # Simulator
    max_steps: int = 10_000

    # Scenario defaults
    default_z: int = 4
    default_l: int = 1

    log_level: str = "WARNING"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get application settings (cached)."""
    return Settings()
