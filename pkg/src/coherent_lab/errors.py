"""Exception hierarchy shared by every coherent_lab module."""

from __future__ import annotations


class CoherentLabError(ValueError):
    """Base class for all errors raised by coherent_lab."""


class DomainError(CoherentLabError):
    """An argument lies outside the domain of the operation."""


class EmptyMeasureError(CoherentLabError):
    def __init__(self, message: str = "empty measure") -> None:
        super().__init__(message)


class NotCoherentError(CoherentLabError):
    def __init__(self, message: str = "not coherent") -> None:
        super().__init__(message)


class NotARepresentationError(CoherentLabError):
    def __init__(self, message: str = "not a representation") -> None:
        super().__init__(message)


class NullCellError(CoherentLabError):
    def __init__(self, message: str = "conditioning on null cell") -> None:
        super().__init__(message)


class ParseError(CoherentLabError):
    """Malformed text input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
