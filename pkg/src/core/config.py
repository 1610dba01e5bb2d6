"""Application configuration management."""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Simulator settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="RYDRING_",
        case_sensitive=False,
        extra="allow",
    )

    # Application
    app_env: str = "development"
    log_level: str = "INFO"
    output_dir: str = "runs"

    # Propagation
    dense_threshold: int = Field(default=6000, gt=0)
    time_chunk: int = Field(default=256, gt=0)
    max_workers: int = Field(default=2, ge=1)

    # Problem size limits (full 2^N space)
    full_space_max_sites: int = 14
    oracle_max_sites: int = 12

    # Numerical tolerances
    norm_tolerance: float = 1e-10
    energy_tolerance: float = 1e-9
    concurrence_tolerance: float = 1e-10
    g2_undefined_below: float = 1e-8


settings = Settings()
