"""
Logging setup.
"""

import logging
import os
import sys
import warnings

from .filters import RunContextFilter
from .formatters import JsonLogFormatter


def setup_logging(log_to_file=None, formatter=None, context_filter=None):
    """
    Configure the root logger for JSON output on STDERR.

    STDOUT stays reserved for reports, tables and series documents, so log
    records never mix with command output.

    Args:
        log_to_file (str | None): Also write records to this file.
        formatter (JsonLogFormatter, optional): Defaults to JsonLogFormatter().
        context_filter (RunContextFilter, optional): Defaults to RunContextFilter().

    Environment:
        - LOG_LEVEL: logging level (default: INFO)
        - SERVICE_NAME: service.name field (default: kzassoc)

    Calling it again is a no-op; ``warnings.warn`` messages are routed through
    the same handlers.
    """
    root_logger = logging.getLogger()
    if getattr(root_logger, "_kzassoc_configured", False):
        return

    log_level = os.getenv("LOG_LEVEL", "INFO").upper()
    try:
        root_logger.setLevel(log_level)
    except ValueError:
        root_logger.setLevel(logging.INFO)
        warnings.warn(f"Invalid LOG_LEVEL '{log_level}', falling back to INFO", stacklevel=2)

    formatter = formatter or JsonLogFormatter()
    context_filter = context_filter or RunContextFilter()

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_to_file:
        handlers.append(logging.FileHandler(log_to_file))
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.addFilter(context_filter)
        root_logger.addHandler(handler)

    # py.warnings gets the handlers directly; propagating too would print twice
    logging.captureWarnings(True)
    warnings_logger = logging.getLogger("py.warnings")
    warnings_logger.propagate = False
    for handler in handlers:
        warnings_logger.addHandler(handler)

    root_logger._kzassoc_configured = True
