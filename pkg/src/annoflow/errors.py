"""Shared exception types.

The HTTP layer maps these onto status codes (NotFoundError -> 404,
DuplicateError -> 409, InvalidInputError and subclasses -> 422), so
lower-level modules should raise the most specific one that applies.
"""


class AnnoflowError(Exception):
    """Base class for all package errors."""


class InvalidInputError(AnnoflowError):
    """Caller-supplied data violates a documented contract."""


class ParseError(InvalidInputError):
    """Malformed input file; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotFoundError(AnnoflowError):
    """Unknown corpus, document, layer, task or worker id."""


class DuplicateError(AnnoflowError):
    """Id or endpoint already registered."""
