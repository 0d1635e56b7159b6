"""Parse diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from reqcheck.core.ast import SourceSpan


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    message: str
    severity: Severity = Severity.ERROR

    def __str__(self) -> str:
        return f"{self.span}: {self.severity.value}: {self.message}"
