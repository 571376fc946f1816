"""Shared diagnostic record used by every stage of the converter."""

from dataclasses import dataclass
from enum import Enum

from .reader import SourcePosition


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"
    NOTE = "note"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    position: SourcePosition
    message: str
    tag: str | None = None

    def format(self, filename: str = "<input>") -> str:
        return "%s:%d:%d: %s %s: %s" % (
            filename,
            self.position.line,
            self.position.column,
            self.severity.value,
            self.code,
            self.message,
        )


def error(code: str, position: SourcePosition, message: str, tag: str | None = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, position, message, tag)


def note(code: str, position: SourcePosition, message: str, tag: str | None = None) -> Diagnostic:
    return Diagnostic(Severity.NOTE, code, position, message, tag)


def has_errors(diagnostics) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
