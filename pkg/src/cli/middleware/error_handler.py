"""Unified error reporting for command-line runs."""
import json
import logging
import sys
from typing import Any, Dict, Optional, TextIO

from src.core.errors import EXIT_NUMERICAL_ERROR, SimulationException

logger = logging.getLogger(__name__)


def emit_error(content: Dict[str, Any], stream: Optional[TextIO] = None) -> None:
    """Write an error document as one JSON line."""
    stream = stream or sys.stderr
    stream.write(json.dumps(content) + "\n")


def simulation_exception_handler(
    exc: SimulationException, stream: Optional[TextIO] = None
) -> int:
    """Handle simulator exceptions.

    Args:
        exc: Simulator exception
        stream: Destination, stderr by default

    Returns:
        Process exit code
    """
    logger.error(f"{exc.code}: {exc.detail}")
    emit_error({"detail": exc.detail, "code": exc.code}, stream)
    return exc.exit_code


def generic_exception_handler(exc: Exception, stream: Optional[TextIO] = None) -> int:
    """Handle unexpected exceptions.

    Args:
        exc: Generic exception
        stream: Destination, stderr by default

    Returns:
        Process exit code
    """
    logger.exception(f"Unexpected failure: {exc}")
    emit_error({"detail": "Internal error", "code": "INTERNAL_ERROR"}, stream)
    return EXIT_NUMERICAL_ERROR
