"""Error hierarchy shared by the physics, analysis and CLI layers.

Every error carries the process exit code the CLI uses for it:
1 for validation and parse problems, 2 for physics errors (operating point
at or above an oscillation threshold), 3 for I/O failures.
"""
from typing import Optional


class SqueezingError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidParameterError(SqueezingError, ValueError):
    """A parameter record violates one of its invariants."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class DomainError(SqueezingError, ValueError):
    """An operation was called outside the domain it is defined on."""


class ThresholdError(SqueezingError):
    """The operating point is at or above an oscillation threshold."""

    exit_code = 2

    def __init__(self, message: str, x: Optional[float] = None, x_threshold: Optional[float] = None):
        super().__init__(message)
        self.x = x
        self.x_threshold = x_threshold


class ConfigParseError(SqueezingError):
    """A run-configuration document could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigValidationError(InvalidParameterError):
    """A run-configuration value is missing or outside its allowed range."""


class UnknownPresetError(SqueezingError):
    """The requested figure preset does not exist."""


class OutputError(SqueezingError):
    """An output file could not be written."""

    exit_code = 3
