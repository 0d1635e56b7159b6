"""
Explicit-state verification of requirement routines.

Every requirement is executed from every initial plant state. Calls are
inlined by pushing a fresh frame, loops are unrolled up to the configured
bound, and assume/assert statements are checked at their program point.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from math import prod
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from opentelemetry import trace
from opentelemetry.trace import Status, StatusCode

from reqcheck.config import VerifyConfig
from reqcheck.core.ast import (
    DURATION, Assert, Assign, Assume, AttributeKind, Call, Case, If,
    LocalAssign, LocalDecl, Loop, Model, Routine, RoutineRole, Sequence,
    Statement, Symbol,
)
from reqcheck.core.evaluator import eval_bool, eval_expr
from reqcheck.core.state import Frame, PlantState, StateKey
from reqcheck.core.wellformed import well_formed
from reqcheck.errors import (
    DomainViolationError, DurationCapExceeded, EnumerationInfeasibleError,
    IllFormedExpressionError, IllFormedModelError, PatternError,
    ReqCheckError, VerificationError,
)
from reqcheck.frontend.printer import print_statement
from reqcheck.metrics import record_verdict, timed_check
from reqcheck.patterns.instance import PatternKind
from reqcheck.patterns.synth import match
from reqcheck.verifier.outcomes import (
    AssertFailed, AssumeViolated, BoundExceeded, Completed, Diverged,
    ExitStatus, Outcome, OutcomeKind, TraceStep, Verdict, VerdictResult,
    aggregate,
)

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)


# ---------------------------------------------------------- initial states

def enumerate_initial_states(model: Model, config: Optional[VerifyConfig] = None) -> List[PlantState]:
    """
    All initial plant states: the product of the attribute domains, ghost time at 0.

    Order follows attribute declaration order, then domain order, with the
    last declared attribute varying fastest.

    Raises:
        EnumerationInfeasibleError: The product exceeds `config.max_initial_states`.
    """
    config = config or VerifyConfig()
    free = [a for a in model.attributes if a.kind is not AttributeKind.GHOST]
    count = prod(a.domain.size for a in free)
    if count > config.max_initial_states:
        raise EnumerationInfeasibleError(
            f"{count} initial states exceed the limit of {config.max_initial_states}")
    states = []
    for combo in itertools.product(*(a.domain.enumerate() for a in free)):
        chosen = dict(zip((a.name for a in free), combo))
        values = {a.name: chosen[a.name] if a.name in chosen else 0 for a in model.attributes}
        states.append(PlantState(values))
    return states


# ------------------------------------------------------------- interpreter

class _Halt(Exception):
    """Ends one run; carries the outcome minus its trace."""

    def __init__(self, kind: OutcomeKind, routine: str, stmt: Optional[Statement] = None,
                 state: Optional[PlantState] = None):
        super().__init__(kind.value)
        self.kind = kind
        self.routine = routine
        self.stmt = stmt
        self.state = state


def _describe(stmt: Statement) -> str:
    """First printed line of a statement, for trace entries."""
    lines = print_statement(stmt).splitlines()
    return lines[0] if lines else ""


class Interpreter:
    """
    Runs routines of one model over plant states.

    Args:
        model (Model): A well-formed, elaborated model.
        config (VerifyConfig): Unroll bound, duration cap, cycle detection.
        check_domains (bool): Raise on assignments leaving a domain. The ASM
            oracle turns this off.
    """

    def __init__(self, model: Model, config: Optional[VerifyConfig] = None, check_domains: bool = True):
        self.model = model
        self.config = config or VerifyConfig()
        self.check_domains = check_domains
        self.visited: Set[StateKey] = set()
        self._trace: List[TraceStep] = []

    def run(self, routine: Union[Routine, str], initial: PlantState) -> Outcome:
        name = routine if isinstance(routine, str) else routine.name
        state = initial.snapshot()
        self._trace = []
        self.visited.add(state.key())
        try:
            self._call(name, state)
        except _Halt as halt:
            return self._outcome(halt)
        return Completed(state, trace=tuple(self._trace))

    def _outcome(self, halt: _Halt) -> Outcome:
        trace_steps = tuple(self._trace)
        span = halt.stmt.span if halt.stmt is not None else None
        if halt.kind is OutcomeKind.ASSUME_VIOLATED:
            return AssumeViolated(span, halt.routine, trace=trace_steps)
        if halt.kind is OutcomeKind.ASSERT_FAILED:
            return AssertFailed(span, halt.routine, trace=trace_steps)
        if halt.kind is OutcomeKind.DIVERGED:
            return Diverged(halt.state, halt.routine, trace=trace_steps)
        return BoundExceeded(halt.routine, trace=trace_steps)

    def _record(self, frame: Frame, stmt: Statement, before: PlantState):
        after = frame.current.snapshot()
        self._trace.append(TraceStep(before, frame.routine, _describe(stmt), stmt.span, after))
        self.visited.add(after.key())

    def _call(self, name: str, state: PlantState):
        routine = self.model.routine(name)
        if routine is None:
            raise IllFormedExpressionError(f"call to undeclared routine '{name}'")
        frame = Frame.enter(name, state)
        self._body(routine.body, frame)

    def _body(self, body: Iterable[Statement], frame: Frame):
        for stmt in body:
            self._exec(stmt, frame)

    def _exec(self, stmt: Statement, frame: Frame):
        if isinstance(stmt, Assign):
            before = frame.current.snapshot()
            value = eval_expr(stmt.value, frame)
            self._check_assignment(stmt.target, value, frame)
            frame.current[stmt.target] = value
            self._record(frame, stmt, before)
        elif isinstance(stmt, LocalDecl):
            frame.local_domains[stmt.name] = stmt.domain
            frame.locals[stmt.name] = stmt.domain.default
        elif isinstance(stmt, LocalAssign):
            before = frame.current.snapshot()
            value = eval_expr(stmt.value, frame)
            domain = frame.local_domains.get(stmt.name)
            if self.check_domains and domain is not None and not domain.contains(value):
                raise DomainViolationError(stmt.name, value)
            frame.locals[stmt.name] = value
            self._record(frame, stmt, before)
        elif isinstance(stmt, (Assume, Assert)):
            before = frame.current.snapshot()
            holds = eval_bool(stmt.cond, frame)
            self._record(frame, stmt, before)
            if not holds:
                kind = OutcomeKind.ASSUME_VIOLATED if isinstance(stmt, Assume) else OutcomeKind.ASSERT_FAILED
                raise _Halt(kind, frame.routine, stmt)
        elif isinstance(stmt, If):
            for guard, body in stmt.branches:
                if eval_bool(guard, frame):
                    self._body(body, frame)
                    return
            self._body(stmt.else_body, frame)
        elif isinstance(stmt, Case):
            value = frame.current[stmt.scrutinee]
            for arm in stmt.arms:
                if value == Symbol(arm.value):
                    self._body(arm.body, frame)
                    return
            # no arm and no default: stutter
            if stmt.default is not None:
                self._body(stmt.default, frame)
        elif isinstance(stmt, Loop):
            self._loop(stmt, frame)
        elif isinstance(stmt, Call):
            self._record(frame, stmt, frame.current.snapshot())
            self._call(stmt.routine, frame.current)
        elif isinstance(stmt, Sequence):
            self._body(stmt.body, frame)
        else:
            raise IllFormedExpressionError(f"cannot execute {type(stmt).__name__}")

    def _check_assignment(self, target: str, value, frame: Frame):
        if target == DURATION and isinstance(value, int) and value > self.config.duration_cap:
            raise DurationCapExceeded(f"duration reached {value}, above the cap of {self.config.duration_cap}")
        if self.check_domains:
            attr = self.model.attribute(target)
            if attr is not None and not attr.domain.contains(value):
                raise DomainViolationError(target, value)

    def _loop(self, loop: Loop, frame: Frame):
        self._body(loop.init, frame)
        executions = 1
        history: Set = set()
        while True:
            if self.config.detect_cycles:
                key = (frame.current.key(), tuple(sorted(frame.locals.items(), key=lambda kv: kv[0])))
                if key in history:
                    if not self._trace:
                        self._record(frame, loop, frame.current.snapshot())
                    raise _Halt(OutcomeKind.DIVERGED, frame.routine, loop, frame.current.snapshot())
                history.add(key)
            if eval_bool(loop.exit_cond, frame):
                return
            if executions >= self.config.unroll_bound:
                raise _Halt(OutcomeKind.BOUND_EXCEEDED, frame.routine, loop)
            self._body(loop.body, frame)
            executions += 1


def execute_routine(model: Model, routine: Union[Routine, str], initial: PlantState,
                    config: Optional[VerifyConfig] = None) -> Outcome:
    """
    Run one routine from one initial state.

    Args:
        model (Model): A well-formed, elaborated model.
        routine (Routine | str): The routine, or its name.
        initial (PlantState): The state to start from; left untouched.
        config (VerifyConfig, optional): Defaults to `VerifyConfig()`.

    Returns:
        Outcome: Completed, AssumeViolated, AssertFailed, Diverged or BoundExceeded.

    Raises:
        DurationCapExceeded: Ghost time passed the configured cap.
        DomainViolationError: An assignment left its target's domain.
    """
    return Interpreter(model, config).run(routine, initial)


# ------------------------------------------------------------ requirements

def _require_well_formed(model: Model):
    diagnostics = well_formed(model)
    if diagnostics:
        raise IllFormedModelError(diagnostics)


def _resolve_requirement(model: Model, requirement: Union[Routine, str]) -> Routine:
    routine = model.routine(requirement) if isinstance(requirement, str) else requirement
    if routine is None:
        raise VerificationError(f"no routine named '{requirement}'")
    if routine.role is not RoutineRole.REQUIREMENT:
        raise VerificationError(f"'{routine.name}' is a {routine.role.value} routine, not a requirement")
    return routine


def _run_tagged(model: Model, routine: Routine, initial: PlantState,
                config: VerifyConfig) -> Tuple[Outcome, Set[StateKey]]:
    interpreter = Interpreter(model, config)
    try:
        outcome = interpreter.run(routine, initial)
    except VerificationError as exc:
        raise type(exc)(str(exc), initial.as_dict()) from exc
    except ReqCheckError as exc:
        raise VerificationError(f"{type(exc).__name__}: {exc}", initial.as_dict()) from exc
    return outcome, interpreter.visited


def _check(model: Model, routine: Routine, config: VerifyConfig) -> Verdict:
    states = enumerate_initial_states(model, config)
    visited: Set[StateKey] = set()
    with tracer.start_as_current_span("check_requirement") as span, timed_check(routine.name):
        span.set_attribute("reqcheck.requirement", routine.name)
        try:
            if config.workers > 1:
                with ThreadPoolExecutor(max_workers=config.workers) as pool:
                    runs = list(pool.map(lambda s: _run_tagged(model, routine, s, config), states))
            else:
                runs = [_run_tagged(model, routine, s, config) for s in states]
        except Exception as exc:
            span.set_status(Status(StatusCode.ERROR, str(exc)))
            raise
        outcomes = [outcome for outcome, _ in runs]
        for _, seen in runs:
            visited.update(seen)
        per_state: Dict[StateKey, Outcome] = {s.key(): o for s, o in zip(states, outcomes)}
        result = aggregate(o.kind for o in outcomes)
        deltas = [o.final.duration - s.duration for s, o in zip(states, outcomes) if isinstance(o, Completed)]
        verdict = Verdict(routine.name, result, per_state, len(visited), max(deltas, default=0))
        span.set_attribute("reqcheck.result", result.value)
        span.set_attribute("reqcheck.states_explored", verdict.states_explored)
        span.set_status(Status(StatusCode.OK))
    record_verdict(result.value, verdict.outcome_counts())
    logger.info(f"{routine.name}: {result.value} ({len(states)} initial states, "
                f"{verdict.states_explored} explored, max duration delta {verdict.max_duration_delta})")
    return verdict


def check_requirement(model: Model, requirement: Union[Routine, str],
                      config: Optional[VerifyConfig] = None) -> Verdict:
    """
    Verify one requirement routine over every initial state.

    Args:
        model (Model): An elaborated model.
        requirement (Routine | str): A routine of role requirement, or its name.
        config (VerifyConfig, optional): Defaults to `VerifyConfig()`.

    Returns:
        Verdict: pass when every run completes or hits a false assume, fail
        when some assert fails or some loop diverges, unknown otherwise.

    Raises:
        IllFormedModelError: `well_formed(model)` reported diagnostics.
        VerificationError: Execution aborted; tagged with the initial state.
    """
    config = config or VerifyConfig()
    _require_well_formed(model)
    return _check(model, _resolve_requirement(model, requirement), config)


def check_all(model: Model, config: Optional[VerifyConfig] = None,
              names: Optional[Iterable[str]] = None) -> List[Verdict]:
    """Verify every requirement of `model` in declaration order, or only those in `names`."""
    config = config or VerifyConfig()
    _require_well_formed(model)
    requirements = model.requirements()
    if names is not None:
        wanted = list(dict.fromkeys(names))
        for name in wanted:
            _resolve_requirement(model, name)
        requirements = [r for r in requirements if r.name in wanted]
    logger.info(f"Checking {len(requirements)} requirements of {model.name}")
    return [_check(model, r, config) for r in requirements]


def worst_case_duration(model: Model, requirement: Union[Routine, str],
                        config: Optional[VerifyConfig] = None) -> int:
    """
    Largest ghost-time increase over all completed runs of a timed obligation.

    Raises:
        PatternError: The requirement is not shaped like a p4 routine.
        VerificationError: The requirement does not pass.
    """
    config = config or VerifyConfig()
    _require_well_formed(model)
    routine = _resolve_requirement(model, requirement)
    instance = match(routine)
    if instance is None or instance.pattern is not PatternKind.P4:
        raise PatternError(f"'{routine.name}' is not a p4 (timed obligation) routine")
    verdict = _check(model, routine, config)
    if verdict.result is not VerdictResult.PASS:
        raise VerificationError(f"'{routine.name}' does not pass ({verdict.result.value})")
    return verdict.max_duration_delta


def aggregate_exit_status(verdicts: Iterable[Verdict]) -> ExitStatus:
    """0 when all pass, 1 on any fail, 2 on unknown without fail."""
    results = {v.result for v in verdicts}
    if VerdictResult.FAIL in results:
        return ExitStatus.FAIL
    if VerdictResult.UNKNOWN in results:
        return ExitStatus.UNKNOWN
    return ExitStatus.PASS
