import logging
import sys
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level: str = "WARNING", log_file: Optional[str] = None) -> None:
    """Install the root handlers for a CLI run.

    Records always go to stderr so that stdout stays parseable for JSON and CSV output.

    Args:
        level: Name of the root log level (e.g. ``"INFO"``).
        log_file: Optional path; when set, records are also appended to this file.
    """
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
