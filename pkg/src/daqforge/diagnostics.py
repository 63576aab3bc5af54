"""Severity-tagged, span-tagged messages shared by every pipeline stage."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Span:
    """Location of a lexeme in the source text.

    ``line`` and ``col`` are 1-based and counted in characters; ``offset``
    and ``length`` are counted in UTF-8 bytes.
    """

    line: int
    col: int
    offset: int
    length: int


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: Optional[Span] = None

    def render(self, filename: str) -> str:
        if self.span is None:
            return f"{self.severity.value} {self.code} {filename} {self.message}"
        return (
            f"{self.severity.value} {self.code} "
            f"{filename}:{self.span.line}:{self.span.col} {self.message}"
        )


def error(code: str, message: str, span: Optional[Span] = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span)


def warning(code: str, message: str, span: Optional[Span] = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span)


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)


def sort_diagnostics(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    """Stable order: (code, span position, message); spanless entries first."""

    def key(d: Diagnostic):
        if d.span is None:
            return (d.code, 0, 0, 0, d.message)
        return (d.code, 1, d.span.line, d.span.col, d.message)

    return sorted(diags, key=key)


def render_all(diags: Iterable[Diagnostic], filename: str) -> list[str]:
    return [d.render(filename) for d in sort_diagnostics(diags)]


def to_json(diags: Iterable[Diagnostic], filename: str) -> str:
    records = []
    for d in sort_diagnostics(diags):
        rec: dict = {
            "severity": d.severity.value,
            "code": d.code,
            "file": filename,
            "message": d.message,
        }
        if d.span is not None:
            rec["line"] = d.span.line
            rec["col"] = d.span.col
        records.append(rec)
    return json.dumps(records, indent=2)
