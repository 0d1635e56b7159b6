"""Outcomes of running one routine from one initial state, and verdicts over all of them."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, Iterable, List, Optional, Tuple

from reqcheck.core.ast import SourceSpan
from reqcheck.core.state import PlantState, StateKey


class ExitStatus(IntEnum):
    PASS = 0
    FAIL = 1
    UNKNOWN = 2
    ERROR = 3


class OutcomeKind(str, Enum):
    COMPLETED = "completed"
    ASSUME_VIOLATED = "assume_violated"
    ASSERT_FAILED = "assert_failed"
    DIVERGED = "diverged"
    BOUND_EXCEEDED = "bound_exceeded"


FAILURE_KINDS = frozenset({OutcomeKind.ASSERT_FAILED, OutcomeKind.DIVERGED})
COUNTEREXAMPLE_KINDS = FAILURE_KINDS | {OutcomeKind.BOUND_EXCEEDED}


@dataclass(frozen=True)
class TraceStep:
    """One executed statement; `statement` is its first printed line."""
    state_before: PlantState
    routine: str
    statement: str
    span: Optional[SourceSpan]
    state_after: PlantState


Trace = Tuple[TraceStep, ...]


@dataclass(frozen=True)
class Outcome:
    trace: Trace = field(default=(), kw_only=True)

    kind = OutcomeKind.COMPLETED

    @property
    def is_failure(self) -> bool:
        return self.kind in FAILURE_KINDS


@dataclass(frozen=True)
class Completed(Outcome):
    final: PlantState
    kind = OutcomeKind.COMPLETED


@dataclass(frozen=True)
class AssumeViolated(Outcome):
    at: Optional[SourceSpan]
    routine: str
    kind = OutcomeKind.ASSUME_VIOLATED


@dataclass(frozen=True)
class AssertFailed(Outcome):
    at: Optional[SourceSpan]
    routine: str
    kind = OutcomeKind.ASSERT_FAILED


@dataclass(frozen=True)
class Diverged(Outcome):
    repeated_state: PlantState
    routine: str
    kind = OutcomeKind.DIVERGED


@dataclass(frozen=True)
class BoundExceeded(Outcome):
    routine: str
    kind = OutcomeKind.BOUND_EXCEEDED


class VerdictResult(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNKNOWN = "unknown"


def aggregate(kinds: Iterable[OutcomeKind]) -> VerdictResult:
    kinds = set(kinds)
    if kinds & FAILURE_KINDS:
        return VerdictResult.FAIL
    if OutcomeKind.BOUND_EXCEEDED in kinds:
        return VerdictResult.UNKNOWN
    return VerdictResult.PASS


@dataclass(frozen=True)
class Verdict:
    """
    Result of checking one requirement from every initial state.

    `per_state` keeps enumeration order. `max_duration_delta` is taken over
    completed runs only.
    """
    requirement: str
    result: VerdictResult
    per_state: Dict[StateKey, Outcome]
    states_explored: int = 0
    max_duration_delta: int = 0

    def outcome_counts(self) -> Dict[str, int]:
        return dict(Counter(o.kind.value for o in self.per_state.values()))

    def counterexamples(self) -> List[Tuple[PlantState, Outcome]]:
        return [(PlantState.from_key(key), outcome) for key, outcome in self.per_state.items()
                if outcome.kind in COUNTEREXAMPLE_KINDS]

    def outcome_for(self, **valuation) -> Optional[Outcome]:
        """The outcome of the first initial state agreeing with `valuation` (symbols by name)."""
        for key, outcome in self.per_state.items():
            values = PlantState.from_key(key).as_dict()
            if all(values.get(k) == v for k, v in valuation.items()):
                return outcome
        return None


def exit_status(result: VerdictResult) -> ExitStatus:
    return {VerdictResult.PASS: ExitStatus.PASS, VerdictResult.FAIL: ExitStatus.FAIL,
            VerdictResult.UNKNOWN: ExitStatus.UNKNOWN}[result]
