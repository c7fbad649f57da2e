import os
from pydantic_settings import BaseSettings
from pydantic import ConfigDict
from typing import Optional, Set
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

class Settings(BaseSettings):
    # Application settings
    APP_NAME: str = "eisrank"
    APP_ENV: str = "development"

    # Curve dataset (CSV `label,a1,a2,a3,a4,a6,N`) merged over the built-in table
    EISRANK_DATA: Optional[str] = os.getenv("EISRANK_DATA")

    # Computation defaults
    DEFAULT_PREC: int = 500  # covers the tau = sigma_11 mod 691 check
    BERNOULLI_CACHE_MAX: int = 128
    DESCENT_PRIME_BOUND: int = 200

    # Scans
    WORKERS: int = 1
    SCAN_BLOCK_SIZE: int = 250

    # Output
    OUTPUT_FORMAT: str = "plain"
    OUTPUT_FORMATS_STR: str = "plain,json,csv"  # Comma-separated string for env var

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: Optional[str] = None

    # Model configuration
    model_config = ConfigDict(
        extra='ignore',  # Ignore extra fields
        case_sensitive=True,
        env_file=".env",
        env_file_encoding='utf-8'
    )

    @property
    def OUTPUT_FORMATS(self) -> Set[str]:
        """Get allowed output formats as a set."""
        return set(fmt.strip().lower() for fmt in self.OUTPUT_FORMATS_STR.split(','))

# Create settings instance
settings = Settings()
