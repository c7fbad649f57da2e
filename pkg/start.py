#!/usr/bin/env python3
"""
Start script for the eisrank command line.

Loads the environment, configures logging before the services are imported, and runs one
command, e.g. ``python start.py paper-examples``.
"""
import logging
import sys
from pathlib import Path

from dotenv import load_dotenv

from eisrank.core.logging_config import configure_logging

logger = logging.getLogger(__name__)


def load_environment() -> bool:
    """Load environment variables from the .env file next to this script."""
    env_path = Path(__file__).parent / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path)
        return True
    return False


def main() -> int:
    """Main entry point for the command line."""
    found_env = load_environment()

    # Settings read the environment on import
    from eisrank.core.config import settings

    configure_logging(settings.LOG_LEVEL, settings.LOG_FILE)
    if not found_env:
        logger.debug("No .env file found. Using system environment variables.")

    from eisrank.cli.main import run

    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
