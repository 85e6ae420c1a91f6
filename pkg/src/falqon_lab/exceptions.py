"""Exception handling for falqon-lab."""

import logging
from typing import Any

from falqon_lab.models import ErrorResponse

logger = logging.getLogger(__name__)

# ——— Custom exceptions ———


class FalqonLabException(Exception):
    """Base exception for falqon-lab."""

    category = "usage"
    exit_code = 2

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class ParameterError(FalqonLabException):
    """Invalid argument, shape or dimension mismatch."""

    pass


class GenerationError(FalqonLabException):
    """Random graph generation exhausted its rejection budget."""

    pass


class SerializationError(FalqonLabException):
    """Malformed edge-list, Pauli text, trace or state file."""

    pass


class CapacityError(FalqonLabException):
    """Problem size exceeds the simulator or eigensolver ceiling."""

    category = "capacity"
    exit_code = 3


class NumericalError(FalqonLabException):
    """Non-finite objective, gradient or state encountered."""

    category = "numerical"
    exit_code = 4


class DegenerateInstanceError(NumericalError):
    """Figure of merit undefined for the instance (e.g. an edgeless graph)."""

    pass


# ——— Helpers ———


def require_capacity(n: int, limit: int, what: str) -> None:
    """Raise CapacityError when ``n`` exceeds ``limit`` qubits."""
    if n > limit:
        raise CapacityError(
            f"{what} supports at most {limit} qubits, got {n}",
            {"n": n, "limit": limit, "operation": what},
        )


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(exc, FalqonLabException):
        return exc.exit_code
    if isinstance(exc, (OSError, ValueError)):
        return 2
    return 1


def error_payload(exc: BaseException) -> ErrorResponse:
    """Render an exception as the CLI's machine-readable error."""
    if isinstance(exc, FalqonLabException):
        logger.error(
            "falqon-lab exception occurred",
            extra={
                "error_type": exc.__class__.__name__,
                "error_message": exc.message,
                "details": exc.details,
            },
        )
        return ErrorResponse(
            error=exc.__class__.__name__,
            category=exc.category,
            exit_code=exc.exit_code,
            message=exc.message,
            details=exc.details,
        )

    logger.exception("Unhandled exception occurred")
    return ErrorResponse(
        error=exc.__class__.__name__,
        category="usage" if exit_code_for(exc) == 2 else "internal",
        exit_code=exit_code_for(exc),
        message=str(exc),
    )
