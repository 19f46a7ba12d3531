"""Logging setup shared by the library, the CLI and the API."""
import json
import logging
from datetime import datetime, timezone

from config import LOG_FORMAT, LOG_LEVEL

ROOT_LOGGER = "progmon"


class StructuredLogFormatter(logging.Formatter):
    """Format log records as one JSON object per line."""

    def format(self, record):
        log_entry = {
            "severity": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "sourceLocation": {
                "file": record.pathname,
                "line": record.lineno,
                "function": record.funcName,
            },
        }
        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_entry)


def configure(level: str = LOG_LEVEL, fmt: str = LOG_FORMAT) -> logging.Logger:
    """Attach the single stream handler to the root ``progmon`` logger.

    Calling it again only updates the level and formatter.
    """
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(level)
    if not root.handlers:
        root.addHandler(logging.StreamHandler())
    for handler in root.handlers:
        if fmt == "json":
            handler.setFormatter(StructuredLogFormatter())
        else:
            handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
    root.propagate = False
    return root


def get_logger(name: str) -> logging.Logger:
    configure_once()
    return logging.getLogger(name)


_configured = False


def configure_once() -> None:
    global _configured
    if not _configured:
        configure()
        _configured = True
