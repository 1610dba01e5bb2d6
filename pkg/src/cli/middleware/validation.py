"""Run configuration validation errors."""
from typing import Any, Dict, List, Optional, TextIO

from pydantic import ValidationError

from src.cli.middleware.error_handler import emit_error
from src.core.errors import EXIT_CONFIG_ERROR


def format_validation_errors(exc: ValidationError) -> List[Dict[str, Any]]:
    """Flatten pydantic errors into field/message/type records."""
    errors = []
    for error in exc.errors():
        field = " -> ".join(str(loc) for loc in error["loc"])
        errors.append({"field": field, "message": error["msg"], "type": error["type"]})
    return errors


def validation_exception_handler(
    exc: ValidationError, stream: Optional[TextIO] = None
) -> int:
    """Handle pydantic validation errors.

    Args:
        exc: Validation error exception
        stream: Destination, stderr by default

    Returns:
        Process exit code
    """
    emit_error(
        {
            "detail": "Validation error",
            "code": "VALIDATION_ERROR",
            "errors": format_validation_errors(exc),
        },
        stream,
    )
    return EXIT_CONFIG_ERROR
