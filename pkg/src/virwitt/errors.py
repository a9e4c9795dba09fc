"""Exception hierarchy shared by every module."""

from __future__ import annotations


class VirWittError(Exception):
    """Base class for all library errors."""


class ParseError(VirWittError):
    """Malformed textual or JSON input."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class DomainError(VirWittError, ValueError):
    """Well-formed input outside the domain of an operation."""
