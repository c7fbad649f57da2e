import sys

from eisrank.cli.main import run
from eisrank.core.config import settings
from eisrank.core.logging_config import configure_logging

configure_logging(settings.LOG_LEVEL, settings.LOG_FILE)
sys.exit(run())
