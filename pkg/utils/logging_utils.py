import logging
import sys

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def configure_logging(level="INFO", stream=None):
    """Send harness logs to stderr (reports own stdout) in one fixed format."""
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=stream or sys.stderr, force=True)
    # matplotlib's font manager is chatty at DEBUG
    logging.getLogger("matplotlib").setLevel(max(level, logging.WARNING))
    return logging.getLogger()


def log_line(message):
    """Default `log_callback` for command-line runs."""
    logging.getLogger("measure").info(message)
