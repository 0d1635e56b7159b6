"""JSON verdict reports. The schema is frozen; see docs/verdict_schema.md."""

from __future__ import annotations

from typing import Dict, List, Literal, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, StrictBool, StrictInt, StrictStr

from reqcheck.core.state import PlantState
from reqcheck.verifier.outcomes import Outcome, TraceStep, Verdict

StateValue = Union[StrictBool, StrictInt, StrictStr]
Valuation = Dict[str, StateValue]


class ReportModel(BaseModel):
    """Base model with common configuration."""
    model_config = ConfigDict(extra="forbid", frozen=True)


class TraceEntryReport(ReportModel):
    routine: str = Field(..., min_length=1, description="Routine executing the statement")
    statement: str = Field(..., description="First line of the statement as printed")
    before: Valuation
    after: Valuation


class CounterexampleReport(ReportModel):
    initial_state: Valuation
    kind: Literal["assert_failed", "diverged", "bound_exceeded"]
    trace: List[TraceEntryReport] = Field(default_factory=list)


class VerdictReport(ReportModel):
    requirement: str = Field(..., min_length=1)
    result: Literal["pass", "fail", "unknown"]
    states_explored: int = Field(..., ge=0)
    max_duration_delta: int = Field(..., ge=0)
    counterexamples: List[CounterexampleReport] = Field(default_factory=list)


class CheckReport(ReportModel):
    model: str
    verdicts: List[VerdictReport]


def _trace_entry(step: TraceStep) -> TraceEntryReport:
    return TraceEntryReport(routine=step.routine, statement=step.statement,
                            before=step.state_before.as_dict(), after=step.state_after.as_dict())


def _counterexample(initial: PlantState, outcome: Outcome, include_trace: bool) -> CounterexampleReport:
    trace = [_trace_entry(s) for s in outcome.trace] if include_trace else []
    return CounterexampleReport(initial_state=initial.as_dict(), kind=outcome.kind.value, trace=trace)


def verdict_report(verdict: Verdict, max_counterexamples: int = 3, include_trace: bool = False) -> VerdictReport:
    """
    Serializable view of a verdict.

    Args:
        verdict (Verdict): The verdict.
        max_counterexamples (int): Counterexamples kept, in enumeration order.
        include_trace (bool): Whether counterexamples carry their full trace.
    """
    counterexamples = [_counterexample(state, outcome, include_trace)
                       for state, outcome in verdict.counterexamples()[:max_counterexamples]]
    return VerdictReport(requirement=verdict.requirement, result=verdict.result.value,
                         states_explored=verdict.states_explored,
                         max_duration_delta=verdict.max_duration_delta,
                         counterexamples=counterexamples)


def check_report(model_name: str, verdicts: Sequence[Verdict], max_counterexamples: int = 3,
                 include_trace: bool = False) -> CheckReport:
    return CheckReport(model=model_name,
                       verdicts=[verdict_report(v, max_counterexamples, include_trace) for v in verdicts])
