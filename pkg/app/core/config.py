from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix SWEAK_)."""

    # Enumeration caps
    enumeration_cap: int = 10**6
    arc_cap: int = 24
    forcing_arc_cap: int = 12
    subdivision_point_cap: int = 256
    quotient_check_limit: int = 32

    # Sampling checks
    sample_points: int = 1000
    sample_denominator: int = 100
    seed: int = 0

    # Result cache
    cache_dir: str = "./.sweak-cache"
    cache_enabled: bool = True
    cache_write_retries: int = 3

    # Export
    off_max_dim: int = 4
    off_digits: int = 12

    # Application settings
    app_name: str = "sweak"
    log_level: str = "WARNING"
    log_file: Optional[str] = None

    class Config:
        env_file = ".env"
        env_prefix = "SWEAK_"


settings = Settings()
