"""Static checks over a model: names, sorts, domains, call graph, duration updates."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple, Union

from reqcheck.core.ast import (
    ARITHMETIC_OPS, BOOLEAN_OPS, DURATION, EQUALITY_OPS, ORDER_OPS, Assert,
    Assign, Assume, AttrRef, AttributeKind, Binary, BinaryOp, Call, Case,
    Domain, Expression, If, IntegerDomain, Literal, LocalAssign, LocalDecl,
    LocalRef, Loop, Model, Not, OldRef, Routine, RoutineRole, Sequence,
    SourceSpan, Statement, Symbol, SymbolicDomain,
)
from reqcheck.core.visit import called_routines, iter_statements

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    """One well-formedness problem."""
    code: str
    message: str
    routine: Optional[str] = None
    span: Optional[SourceSpan] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        inside = f"in {self.routine}: " if self.routine else ""
        return f"{where}{inside}{self.message} [{self.code}]"


BOOL = "bool"
INT = "int"


@dataclass(frozen=True)
class SymSort:
    """Sort of a symbolic expression: the domains it may belong to."""
    domains: FrozenSet[Tuple[str, ...]]


Sort = Union[str, SymSort]


def well_formed(model: Model) -> List[Diagnostic]:
    """
    Check a model for everything evaluation and execution rely on.

    Args:
        model (Model): An elaborated model (rules and patterns already
            turned into routines).

    Returns:
        List[Diagnostic]: Empty when the model is well-formed.
    """
    diagnostics = _Checker(model).run()
    if diagnostics:
        logger.debug(f"Model {model.name}: {len(diagnostics)} diagnostics")
    return diagnostics


def _compatible(a: Sort, b: Sort) -> bool:
    if isinstance(a, SymSort) and isinstance(b, SymSort):
        return bool(a.domains & b.domains)
    return a == b


def _describe(sort: Sort) -> str:
    if isinstance(sort, SymSort):
        return "symbolic {" + " | ".join(", ".join(d) for d in sorted(sort.domains)) + "}"
    return sort


def _domain_sort(domain: Domain) -> Sort:
    if isinstance(domain, IntegerDomain):
        return INT
    return SymSort(frozenset({domain.values}))


class _Checker:
    def __init__(self, model: Model):
        self.model = model
        self.diagnostics: List[Diagnostic] = []
        self.constants: Dict[str, FrozenSet[Tuple[str, ...]]] = {
            name: frozenset(d.values for d in domains)
            for name, domains in model.symbolic_constants().items()
        }
        self.routine: Optional[Routine] = None

    def run(self) -> List[Diagnostic]:
        self._check_attributes()
        self._check_routine_names()
        self._check_call_graph()
        for routine in self.model.routines:
            self._check_routine(routine)
        return self.diagnostics

    def report(self, code: str, message: str, span: Optional[SourceSpan] = None):
        name = self.routine.name if self.routine else None
        self.diagnostics.append(Diagnostic(code, message, name, span))

    # ---------------------------------------------------------- declarations

    def _check_attributes(self):
        seen: Set[str] = set()
        for attr in self.model.attributes:
            if attr.name in seen:
                self.report("duplicate-attribute", f"attribute '{attr.name}' is declared twice", attr.span)
            seen.add(attr.name)
            if attr.kind is AttributeKind.GHOST and attr.name != DURATION:
                self.report("ghost-attribute", f"only '{DURATION}' may be a ghost attribute, not '{attr.name}'",
                            attr.span)
        duration = self.model.attribute(DURATION)
        if duration is None:
            self.report("duration-missing", f"the model must declare 'ghost attribute {DURATION}'")
        elif (duration.kind is not AttributeKind.GHOST or not isinstance(duration.domain, IntegerDomain)
              or not duration.domain.contains(0)):
            self.report("duration-malformed",
                        f"'{DURATION}' must be a ghost attribute over an integer range containing 0",
                        duration.span)

    def _check_routine_names(self):
        seen: Set[str] = set()
        for routine in self.model.routines:
            if routine.name in seen:
                self.report("duplicate-routine", f"routine '{routine.name}' is declared twice", routine.span)
            seen.add(routine.name)
        if self.model.routine(self.model.step_name) is None:
            self.report("missing-step", f"step routine '{self.model.step_name}' does not exist")

    def _check_call_graph(self):
        graph = {r.name: called_routines(r.body) for r in self.model.routines}
        state: Dict[str, int] = {}
        reported: Set[FrozenSet[str]] = set()

        def visit(name: str, path: List[str]):
            state[name] = 1
            for callee in graph.get(name, []):
                if callee not in graph:
                    continue
                if state.get(callee) == 1:
                    cycle = path[path.index(callee):] + [callee]
                    if frozenset(cycle) not in reported:
                        reported.add(frozenset(cycle))
                        routine = self.model.routine(callee)
                        self.diagnostics.append(Diagnostic(
                            "recursion", f"recursive call chain {' -> '.join(cycle)}",
                            callee, routine.span if routine else None))
                elif callee not in state:
                    visit(callee, path + [callee])
            state[name] = 2

        for name in graph:
            if name not in state:
                visit(name, [name])

    # -------------------------------------------------------------- routines

    def _check_routine(self, routine: Routine):
        self.routine = routine
        scope: Dict[str, Domain] = {}
        self._check_body(routine.body, scope)
        if routine.role is RoutineRole.REQUIREMENT and not any(
                isinstance(s, Assert) for s in iter_statements(routine.body)):
            self.report("no-assert", f"requirement '{routine.name}' contains no assert", routine.span)
        self.routine = None

    def _check_body(self, body, scope: Dict[str, Domain]):
        for stmt in body:
            self._check_statement(stmt, scope)

    def _check_statement(self, stmt: Statement, scope: Dict[str, Domain]):
        if isinstance(stmt, Assign):
            self._check_assign(stmt, scope)
        elif isinstance(stmt, LocalDecl):
            if stmt.name in scope:
                self.report("duplicate-local", f"local '{stmt.name}' is declared twice", stmt.span)
            elif self.model.attribute(stmt.name) is not None:
                self.report("duplicate-local", f"local '{stmt.name}' shadows an attribute", stmt.span)
            scope[stmt.name] = stmt.domain
        elif isinstance(stmt, LocalAssign):
            domain = scope.get(stmt.name)
            if domain is None:
                self.report("unknown-local", f"local '{stmt.name}' is assigned before its declaration", stmt.span)
            else:
                self._check_value(stmt.name, domain, stmt.value, scope, stmt.span)
        elif isinstance(stmt, (Assume, Assert)):
            self._expect(stmt.cond, BOOL, scope, stmt.span)
        elif isinstance(stmt, If):
            for guard, body in stmt.branches:
                self._expect(guard, BOOL, scope, stmt.span)
                self._check_body(body, dict(scope))
            self._check_body(stmt.else_body, dict(scope))
        elif isinstance(stmt, Case):
            self._check_case(stmt, scope)
        elif isinstance(stmt, Loop):
            self._check_body(stmt.init, scope)
            self._expect(stmt.exit_cond, BOOL, scope, stmt.span)
            self._check_body(stmt.body, dict(scope))
        elif isinstance(stmt, Call):
            if self.model.routine(stmt.routine) is None:
                self.report("unknown-routine", f"call to undeclared routine '{stmt.routine}'", stmt.span)
        elif isinstance(stmt, Sequence):
            self._check_body(stmt.body, scope)

    def _check_assign(self, stmt: Assign, scope: Dict[str, Domain]):
        attr = self.model.attribute(stmt.target)
        if attr is None:
            hint = " (it is a local)" if stmt.target in scope else ""
            self.report("unresolved-name", f"assignment to undeclared attribute '{stmt.target}'{hint}", stmt.span)
            return
        if attr.kind is AttributeKind.ENVIRONMENT:
            self.report("env-assignment",
                        f"environment attribute '{attr.name}' cannot be assigned; constrain it with assume",
                        stmt.span)
            return
        if attr.name == DURATION:
            if not _is_duration_increment(stmt.value):
                self.report("duration-update",
                            f"'{DURATION}' may only be updated as '{DURATION} := {DURATION} + k' with constant k >= 0",
                            stmt.span)
            return
        self._check_value(attr.name, attr.domain, stmt.value, scope, stmt.span)

    def _check_value(self, name: str, domain: Domain, value: Expression, scope, span):
        sort = self._sort(value, scope, False, span)
        if sort is None:
            return
        if (isinstance(value, Literal) and isinstance(value.value, Symbol)
                and isinstance(domain, SymbolicDomain) and not domain.contains(value.value)):
            self.report("domain-violation", f"'{value.value}' is not a value of '{name}'", value.span or span)
            return
        if not _compatible(sort, _domain_sort(domain)):
            self.report("sort-error", f"cannot assign {_describe(sort)} to '{name}' of sort "
                                      f"{_describe(_domain_sort(domain))}", value.span or span)
            return
        if isinstance(value, Literal) and not domain.contains(value.value):
            self.report("domain-violation", f"{value.value} is outside the domain of '{name}'", value.span or span)

    def _check_case(self, stmt: Case, scope: Dict[str, Domain]):
        attr = self.model.attribute(stmt.scrutinee)
        if attr is None or not isinstance(attr.domain, SymbolicDomain):
            self.report("case-scrutinee", f"case needs a symbolic attribute, got '{stmt.scrutinee}'", stmt.span)
            values: Tuple[str, ...] = ()
        else:
            values = attr.domain.values
        seen: Set[str] = set()
        for arm in stmt.arms:
            if values and arm.value not in values:
                self.report("case-arm", f"'{arm.value}' is not a value of '{stmt.scrutinee}'", arm.span or stmt.span)
            if arm.value in seen:
                self.report("case-arm", f"duplicate case arm '{arm.value}'", arm.span or stmt.span)
            seen.add(arm.value)
            self._check_body(arm.body, dict(scope))
        if stmt.default is not None:
            self._check_body(stmt.default, dict(scope))

    # ----------------------------------------------------------- expressions

    def _expect(self, expr: Expression, expected: Sort, scope, span):
        sort = self._sort(expr, scope, False, span)
        if sort is not None and sort != expected:
            self.report("sort-error", f"expected {expected}, got {_describe(sort)}", expr.span or span)

    def _sort(self, expr: Expression, scope: Dict[str, Domain], in_old: bool, span) -> Optional[Sort]:
        span = expr.span or span
        if isinstance(expr, Literal):
            value = expr.value
            if isinstance(value, bool):
                return BOOL
            if isinstance(value, int):
                return INT
            if isinstance(value, Symbol):
                domains = self.constants.get(value.name)
                if domains is None:
                    self.report("unresolved-name", f"unknown symbolic constant '{value.name}'", span)
                    return None
                return SymSort(domains)
            self.report("sort-error", f"unsupported literal {value!r}", span)
            return None
        if isinstance(expr, AttrRef):
            attr = self.model.attribute(expr.name)
            if attr is None:
                self.report("unresolved-name", f"unknown name '{expr.name}'", span)
                return None
            return _domain_sort(attr.domain)
        if isinstance(expr, LocalRef):
            if in_old:
                self.report("old-local", f"local '{expr.name}' cannot appear under 'old'", span)
            domain = scope.get(expr.name)
            if domain is None:
                self.report("unknown-local", f"local '{expr.name}' is read before its declaration", span)
                return None
            return _domain_sort(domain)
        if isinstance(expr, OldRef):
            if in_old:
                self.report("nested-old", "'old' cannot be nested inside 'old'", span)
            return self._sort(expr.inner, scope, True, span)
        if isinstance(expr, Not):
            self._expect_sub(expr.operand, BOOL, scope, in_old, span)
            return BOOL
        if isinstance(expr, Binary):
            return self._sort_binary(expr, scope, in_old, span)
        self.report("sort-error", f"unsupported expression {type(expr).__name__}", span)
        return None

    def _expect_sub(self, expr, expected, scope, in_old, span):
        sort = self._sort(expr, scope, in_old, span)
        if sort is not None and sort != expected:
            self.report("sort-error", f"expected {expected}, got {_describe(sort)}", expr.span or span)

    def _sort_binary(self, expr: Binary, scope, in_old, span) -> Optional[Sort]:
        op = expr.op
        if op in BOOLEAN_OPS:
            self._expect_sub(expr.lhs, BOOL, scope, in_old, span)
            self._expect_sub(expr.rhs, BOOL, scope, in_old, span)
            return BOOL
        if op in EQUALITY_OPS:
            lhs = self._sort(expr.lhs, scope, in_old, span)
            rhs = self._sort(expr.rhs, scope, in_old, span)
            if lhs is not None and rhs is not None and not _compatible(lhs, rhs):
                self.report("sort-error", f"'{op.value}' compares {_describe(lhs)} with {_describe(rhs)}", span)
            return BOOL
        if op in ORDER_OPS or op in ARITHMETIC_OPS:
            self._expect_sub(expr.lhs, INT, scope, in_old, span)
            self._expect_sub(expr.rhs, INT, scope, in_old, span)
            return BOOL if op in ORDER_OPS else INT
        self.report("sort-error", f"unknown operator {op!r}", span)
        return None


def _is_duration_increment(value: Expression) -> bool:
    return (isinstance(value, Binary) and value.op is BinaryOp.ADD
            and value.lhs == AttrRef(DURATION)
            and isinstance(value.rhs, Literal)
            and isinstance(value.rhs.value, int) and not isinstance(value.rhs.value, bool)
            and value.rhs.value >= 0)


def condition_diagnostics(model: Model, expr: Expression) -> List[Diagnostic]:
    """Diagnostics for using `expr` as a boolean condition outside any routine."""
    checker = _Checker(model)
    checker._expect(expr, BOOL, {}, expr.span)
    return checker.diagnostics
