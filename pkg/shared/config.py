"""Configuration management for the coherent-feedback squeezing toolkit."""
from pathlib import Path
from typing import Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings loaded from environment variables (prefix CFSQ_)."""

    model_config = SettingsConfigDict(
        env_prefix='CFSQ_',
        env_file='.env',
        env_file_encoding='utf-8',
        case_sensitive=False,
        extra='ignore'
    )

    # Logging
    log_level: str = "INFO"
    log_dir: Optional[str] = None

    # Output
    output_dir: str = "."
    default_format: str = "csv"
    significant_digits: int = Field(default=12, ge=12, le=17)

    # Sweep resolution
    t2_grid_points: int = Field(default=101, ge=2)
    frequency_points: int = Field(default=400, ge=2)

    # Optimal transmissivity search
    optimizer_grid_points: int = Field(default=201, ge=3)
    optimizer_xtol: float = 1e-6

    # Closed-loop threshold
    threshold_xtol: float = 1e-9
    denominator_guard: float = 1e-9

    # Enhancement bandwidth
    bandwidth_steps: int = Field(default=2000, ge=2)
    bandwidth_xtol_hz: float = 1e3

    def get_output_path(self, path: str) -> Path:
        """Resolve an output path relative to OUTPUT_DIR."""
        candidate = Path(path)
        if candidate.is_absolute():
            return candidate
        return Path(self.output_dir) / candidate

    def ensure_log_dir(self) -> Optional[Path]:
        """Create the log directory if file logging is enabled."""
        if not self.log_dir:
            return None
        log_path = Path(self.log_dir)
        log_path.mkdir(parents=True, exist_ok=True)
        return log_path


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
