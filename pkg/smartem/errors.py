"""
Exception types raised by the smartem library.

Commands catch ``SmartEmError`` and turn it into a red console message and a
non-zero exit status. Scenario invariant violations are reported as data
(see ``smartem.scenario.Violation``), not raised.
"""

from typing import Optional


class SmartEmError(Exception):
    """Base class for all smartem errors."""


class DomainError(SmartEmError, ValueError):
    """An operation was called outside its mathematical domain."""


class GridMismatchError(DomainError):
    """Two coverage reports were computed over different evaluation grids."""


class ScenarioParseError(SmartEmError):
    """A scenario or candidate file could not be parsed.

    Args:
        message: Human readable description.
        path: File that failed to parse.
        line: 1-based line of a JSON syntax error, if known.
        column: 1-based column of a JSON syntax error, if known.
        location: Dotted field path of a schema error, if known.
    """

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
        location: Optional[str] = None,
    ):
        self.path = path
        self.line = line
        self.column = column
        self.location = location
        super().__init__(message)

    def __str__(self) -> str:
        where = self.path or "<input>"
        if self.line is not None:
            where = f"{where}:{self.line}:{self.column}"
        elif self.location:
            where = f"{where} at {self.location}"
        return f"{where}: {self.args[0]}"
