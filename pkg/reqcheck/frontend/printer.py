"""Deterministic pretty-printer emitting `.req` text."""

from __future__ import annotations

from dataclasses import replace
from typing import List, Sequence as Seq

from reqcheck.asm.rules import AsmRule, Cond, NamedRule, Par, RuleRef, Skip, Switch, Update
from reqcheck.core.ast import (
    Assert, Assign, Assume, AttrRef, AttributeDecl, AttributeKind, Binary,
    BinaryOp, Call, Case, Domain, Expression, If, IntegerDomain, Literal,
    LocalAssign, LocalDecl, LocalRef, Loop, Model, Not, OldRef, Routine,
    RoutineRole, Sequence, Statement, format_value,
)
from reqcheck.patterns.instance import PatternInstance

INDENT = "  "

# binding strength; higher binds tighter
_IMPLIES, _OR, _AND, _NOT, _CMP, _SUM, _OLD, _ATOM = range(1, 9)

_LEVEL = {
    BinaryOp.IMPLIES: _IMPLIES,
    BinaryOp.OR: _OR,
    BinaryOp.AND: _AND,
    BinaryOp.EQ: _CMP, BinaryOp.NEQ: _CMP,
    BinaryOp.LE: _CMP, BinaryOp.LT: _CMP, BinaryOp.GE: _CMP, BinaryOp.GT: _CMP,
    BinaryOp.ADD: _SUM, BinaryOp.SUB: _SUM,
    BinaryOp.MAX: _ATOM, BinaryOp.MIN: _ATOM,
}


def _level(expr: Expression) -> int:
    if isinstance(expr, Binary):
        return _LEVEL[expr.op]
    if isinstance(expr, Not):
        return _NOT
    if isinstance(expr, OldRef):
        return _OLD
    return _ATOM


def print_expression(expr: Expression) -> str:
    """Render an expression with the fewest parentheses that reparse to the same tree."""
    return _expr(expr, 0)


def _expr(expr: Expression, minimum: int) -> str:
    text = _expr_bare(expr)
    return f"({text})" if _level(expr) < minimum else text


def _expr_bare(expr: Expression) -> str:
    if isinstance(expr, Literal):
        return format_value(expr.value)
    if isinstance(expr, (AttrRef, LocalRef)):
        return expr.name
    if isinstance(expr, OldRef):
        inner = _expr(expr.inner, _ATOM)
        return f"old {inner}"
    if isinstance(expr, Not):
        return f"not {_expr(expr.operand, _NOT)}"
    if isinstance(expr, Binary):
        op = expr.op
        if op in (BinaryOp.MAX, BinaryOp.MIN):
            return f"{op.value}({_expr(expr.lhs, 0)}, {_expr(expr.rhs, 0)})"
        level = _LEVEL[op]
        if op is BinaryOp.IMPLIES:
            lhs, rhs = _expr(expr.lhs, level + 1), _expr(expr.rhs, level)
        elif level == _CMP:
            lhs, rhs = _expr(expr.lhs, _SUM), _expr(expr.rhs, _SUM)
        else:
            lhs, rhs = _expr(expr.lhs, level), _expr(expr.rhs, level + 1)
        return f"{lhs} {op.value} {rhs}"
    raise TypeError(f"cannot print {type(expr).__name__}")


def _domain(domain: Domain) -> str:
    if isinstance(domain, IntegerDomain):
        return f"{domain.lo} .. {domain.hi}"
    return "{" + ", ".join(domain.values) + "}"


class _Writer:
    def __init__(self):
        self.lines: List[str] = []

    def emit(self, depth: int, text: str):
        self.lines.append(f"{INDENT * depth}{text}" if text else "")

    def annotate(self, depth: int, annotation: str):
        for line in annotation.split("\n") if annotation else ():
            self.emit(depth, f"-- {line}".rstrip())

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    # statements

    def body(self, depth: int, body: Seq[Statement]):
        for stmt in body:
            self.statement(depth, stmt)

    def statement(self, depth: int, stmt: Statement):
        if isinstance(stmt, Sequence):
            self.body(depth, stmt.body)
            return
        self.annotate(depth, stmt.annotation)
        if isinstance(stmt, (Assign, LocalAssign)):
            target = stmt.target if isinstance(stmt, Assign) else stmt.name
            self.emit(depth, f"{target} := {print_expression(stmt.value)}")
        elif isinstance(stmt, LocalDecl):
            self.emit(depth, f"local {stmt.name} : {_domain(stmt.domain)}")
        elif isinstance(stmt, Assume):
            self.emit(depth, f"assume {print_expression(stmt.cond)} end")
        elif isinstance(stmt, Assert):
            self.emit(depth, f"assert {print_expression(stmt.cond)} end")
        elif isinstance(stmt, If):
            for index, (guard, body) in enumerate(stmt.branches):
                keyword = "if" if index == 0 else "elseif"
                self.emit(depth, f"{keyword} {print_expression(guard)} then")
                self.body(depth + 1, body)
            if stmt.else_body:
                self.emit(depth, "else")
                self.body(depth + 1, stmt.else_body)
            self.emit(depth, "end")
        elif isinstance(stmt, Case):
            self.emit(depth, f"case {stmt.scrutinee}")
            for arm in stmt.arms:
                self.emit(depth + 1, f"when {arm.value} then")
                self.body(depth + 2, arm.body)
            if stmt.default is not None:
                self.emit(depth + 1, "else")
                self.body(depth + 2, stmt.default)
            self.emit(depth, "end")
        elif isinstance(stmt, Loop):
            self.emit(depth, "from")
            self.body(depth + 1, stmt.init)
            self.emit(depth, f"until {print_expression(stmt.exit_cond)}")
            self.emit(depth, "loop")
            self.body(depth + 1, stmt.body)
            self.emit(depth, "end")
        elif isinstance(stmt, Call):
            self.emit(depth, stmt.routine)
        else:
            raise TypeError(f"cannot print {type(stmt).__name__}")

    def routine(self, depth: int, routine: Routine):
        self.annotate(depth, routine.annotation)
        role = "" if routine.role is RoutineRole.STEP else f" {routine.role.value}"
        self.emit(depth, f"routine {routine.name}{role} do")
        self.body(depth + 1, routine.body)
        self.emit(depth, "end")

    # rules

    def rule(self, depth: int, rule: AsmRule):
        if isinstance(rule, Update):
            args = f"({', '.join(print_expression(a) for a in rule.args)})" if rule.args else ""
            self.emit(depth, f"{rule.location}{args} := {print_expression(rule.value)}")
        elif isinstance(rule, Skip):
            self.emit(depth, "skip")
        elif isinstance(rule, RuleRef):
            self.emit(depth, rule.name)
        elif isinstance(rule, Par):
            self.emit(depth, "par")
            for sub in rule.rules:
                self.rule(depth + 1, sub)
            self.emit(depth, "end")
        elif isinstance(rule, Cond):
            self.emit(depth, f"if {print_expression(rule.guard)} then")
            self.rule(depth + 1, rule.then_rule)
            if rule.else_rule is not None:
                self.emit(depth, "else")
                self.rule(depth + 1, rule.else_rule)
            self.emit(depth, "end")
        elif isinstance(rule, Switch):
            self.emit(depth, f"case {rule.scrutinee}")
            for arm in rule.arms:
                self.emit(depth + 1, f"when {arm.value} then")
                self.rule(depth + 2, arm.rule)
            if rule.default is not None:
                self.emit(depth + 1, "else")
                self.rule(depth + 2, rule.default)
            self.emit(depth, "end")
        else:
            raise TypeError(f"cannot print {type(rule).__name__}")

    def named_rule(self, rule: NamedRule):
        self.annotate(0, rule.annotation)
        self.emit(0, f"rule {rule.name} =")
        self.rule(1, rule.body)

    def pattern(self, instance: PatternInstance):
        self.annotate(0, instance.annotation)
        within = f" within {instance.t}" if instance.t is not None else ""
        self.emit(0, f"pattern {instance.pattern.value} {instance.name} calls {instance.inner}{within}")
        for condition in instance.conditions:
            self.emit(1, f"where {print_expression(condition)}")
        self.emit(0, "end")

    def attribute(self, attr: AttributeDecl):
        self.annotate(0, attr.annotation)
        prefix = "" if attr.kind is AttributeKind.MACHINE else f"{attr.kind.value} "
        self.emit(0, f"{prefix}attribute {attr.name} : {_domain(attr.domain)}")


def print_model(model: Model) -> str:
    """
    Render a model as `.req` text.

    Layout is fixed: header, attributes, explicit step declaration, then rules,
    routines and pattern declarations, separated by blank lines. Annotations
    come back as `--` comments above the node they belong to.
    """
    out = _Writer()
    out.annotate(0, model.annotation)
    out.emit(0, f"model {model.name}")
    if model.attributes:
        out.emit(0, "")
        for attr in model.attributes:
            out.attribute(attr)
    if model.step is not None:
        out.emit(0, "")
        out.emit(0, f"step {model.step}")
    for rule in model.rules:
        out.emit(0, "")
        out.named_rule(rule)
    for routine in model.routines:
        out.emit(0, "")
        out.routine(0, routine)
    for instance in model.patterns:
        out.emit(0, "")
        out.pattern(instance)
    return out.text()


def print_routine(routine: Routine) -> str:
    out = _Writer()
    out.routine(0, routine)
    return out.text()


def print_statement(stmt: Statement) -> str:
    """Render one statement (without its annotation)."""
    out = _Writer()
    out.statement(0, replace(stmt, annotation=""))
    return out.text()
