"""Exception hierarchy shared by every reqcheck component."""

from __future__ import annotations

from typing import Any, Dict, List, Optional


class ReqCheckError(Exception):
    """Base class for all errors raised by reqcheck."""


class ParseError(ReqCheckError):
    """Raised when a `.req` source cannot be turned into a model."""

    def __init__(self, diagnostics: List[Any]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse error")


class IllFormedModelError(ReqCheckError):
    """Raised when an operation requires a well-formed model and gets diagnostics."""

    def __init__(self, diagnostics: List[Any]):
        self.diagnostics = list(diagnostics)
        summary = "; ".join(str(d) for d in self.diagnostics[:3])
        more = f" (+{len(self.diagnostics) - 3} more)" if len(self.diagnostics) > 3 else ""
        super().__init__(f"model is not well-formed: {summary}{more}")


class IllFormedExpressionError(ReqCheckError):
    """Unbound name or sort mismatch met during evaluation."""


class DomainViolationError(ReqCheckError):
    """A value left the domain of the attribute or local it was assigned to."""

    def __init__(self, name: str, value: Any):
        self.name = name
        self.value = value
        super().__init__(f"value {value!s} is outside the domain of {name}")


class PatternError(ReqCheckError):
    """Invalid pattern instance or a routine that is not of the expected shape."""


class TranslationError(ReqCheckError):
    """ASM rules that cannot be translated into statements."""


class ConflictingUpdateError(TranslationError):
    """Two parallel updates assign different values to one location."""


class UnsupportedLocationError(TranslationError):
    """An ASM update targets a location with arguments."""


class TransformError(ReqCheckError):
    """A model transformation could not be applied."""


class VerificationError(ReqCheckError):
    """Verification aborted; tagged with the initial state it ran from."""

    def __init__(self, message: str, initial_state: Optional[Dict[str, Any]] = None):
        self.initial_state = initial_state
        if initial_state is not None:
            valuation = ", ".join(f"{k}={v}" for k, v in initial_state.items())
            message = f"{message} [initial state: {valuation}]"
        super().__init__(message)


class DurationCapExceeded(VerificationError):
    """The ghost duration grew past the configured cap."""


class EnumerationInfeasibleError(VerificationError):
    """The product of attribute domains is larger than the configured cap."""
