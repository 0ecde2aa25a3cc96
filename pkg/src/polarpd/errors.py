"""Exception types shared across the package."""


class PolarPDError(Exception):
    """Base class for data errors raised by this package."""


class ParseError(PolarPDError, ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(PolarPDError, ValueError):
    """Well-formed input that violates a domain invariant."""
