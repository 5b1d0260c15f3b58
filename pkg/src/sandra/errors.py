"""Exception and warning types shared across the package.

Every error derives from :class:`SandraError` and carries an optional
:class:`SourceSpan` plus a ``details`` dict so the CLI can render both
human-readable and machine-readable diagnostics from the same object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass(frozen=True)
class SourceSpan:
    """Half-open region of an input document, 1-based line and column."""

    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class SandraError(Exception):
    """Base class for all package errors."""

    def __init__(
        self,
        message: str,
        *,
        span: Optional[SourceSpan] = None,
        details: Optional[dict[str, Any]] = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.span = span
        self.details = dict(details or {})

    @property
    def code(self) -> str:
        # stable identifier for machine output, e.g. "DuplicateName"
        name = type(self).__name__
        return name[:-5] if name.endswith("Error") else name

    def render(self) -> str:
        loc = f" at {self.span}" if self.span is not None else ""
        return f"{self.code}{loc}: {self.message}"


class ParseError(SandraError):
    """Syntax error in the declaration DSL; always carries a span."""


class SchemaError(SandraError):
    """Structured document does not match the expected schema.

    ``details['path']`` names the offending location, e.g.
    ``$.descriptions[2].components``.
    """


class DuplicateNameError(SandraError):
    pass


class UnknownReferenceError(SandraError):
    pass


class EmptyDescriptionError(SandraError):
    pass


class CompositionCycleError(SandraError):
    pass


class SubsumptionCycleError(SandraError):
    pass


class KindMismatchError(SandraError):
    pass


class DuplicateEntityIdError(SandraError):
    pass


class UnknownRoleError(SandraError):
    pass


class UnknownDescriptionError(SandraError):
    pass


class MissingBasisError(SandraError):
    pass


class RankDeficientError(SandraError):
    pass


class NonFiniteError(SandraError):
    pass


class DimensionMismatchError(SandraError):
    pass


class DuplicateComponentsWarning(UserWarning):
    """Two descriptions declare identical component sets."""


class KinkWarning(UserWarning):
    """A coefficient sits within the kink tolerance of the rectifier."""


@dataclass(frozen=True)
class Diagnostic:
    """Normalized form of an error for machine output."""

    code: str
    message: str
    span: Optional[SourceSpan] = None
    details: dict[str, Any] = field(default_factory=dict)

    @staticmethod
    def from_error(err: SandraError) -> "Diagnostic":
        return Diagnostic(code=err.code, message=err.message, span=err.span, details=err.details)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.span is not None:
            out["line"] = self.span.line
            out["column"] = self.span.column
            out["length"] = self.span.length
        if self.details:
            out["details"] = self.details
        return out
