"""Traversal and rebuilding helpers for expressions and statements."""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Iterable, Iterator, List, Optional, Tuple, Union

from reqcheck.core.ast import (
    Assert, Assign, Assume, Binary, Body, Call, Case, Expression, If,
    LocalAssign, Loop, Not, OldRef, Sequence, Statement, iter_bodies,
)

ExprFn = Callable[[Expression], Expression]
StmtFn = Callable[[Statement], Union[Statement, Tuple[Statement, ...]]]


def walk_expr(expr: Expression) -> Iterator[Expression]:
    """Pre-order walk over an expression tree."""
    yield expr
    if isinstance(expr, (OldRef,)):
        yield from walk_expr(expr.inner)
    elif isinstance(expr, Not):
        yield from walk_expr(expr.operand)
    elif isinstance(expr, Binary):
        yield from walk_expr(expr.lhs)
        yield from walk_expr(expr.rhs)


def map_expr(expr: Expression, fn: ExprFn) -> Expression:
    """Rebuild an expression bottom-up, applying `fn` to every node."""
    if isinstance(expr, OldRef):
        expr = replace(expr, inner=map_expr(expr.inner, fn))
    elif isinstance(expr, Not):
        expr = replace(expr, operand=map_expr(expr.operand, fn))
    elif isinstance(expr, Binary):
        expr = replace(expr, lhs=map_expr(expr.lhs, fn), rhs=map_expr(expr.rhs, fn))
    return fn(expr)


def statement_expressions(stmt: Statement) -> List[Expression]:
    """The expressions a statement evaluates directly (not those of nested bodies)."""
    if isinstance(stmt, (Assign, LocalAssign)):
        return [stmt.value]
    if isinstance(stmt, (Assume, Assert)):
        return [stmt.cond]
    if isinstance(stmt, If):
        return [guard for guard, _ in stmt.branches]
    if isinstance(stmt, Loop):
        return [stmt.exit_cond]
    return []


def iter_statements(body: Iterable[Statement]) -> Iterator[Statement]:
    """Pre-order walk over statements, descending into nested bodies."""
    for stmt in body:
        yield stmt
        for nested in iter_bodies(stmt):
            yield from iter_statements(nested)


def called_routines(body: Iterable[Statement]) -> List[str]:
    return [s.routine for s in iter_statements(body) if isinstance(s, Call)]


def map_body(body: Iterable[Statement], stmt_fn: Optional[StmtFn] = None,
             expr_fn: Optional[ExprFn] = None) -> Body:
    """
    Rebuild a statement list bottom-up.

    `expr_fn` rewrites every expression node; `stmt_fn` may return a single
    statement or a tuple of statements, which is spliced in place.
    """
    result: List[Statement] = []
    for stmt in body:
        rebuilt = _map_statement(stmt, stmt_fn, expr_fn)
        if stmt_fn is not None:
            rebuilt = stmt_fn(rebuilt)
        if isinstance(rebuilt, tuple):
            result.extend(rebuilt)
        else:
            result.append(rebuilt)
    return tuple(result)


def _map_statement(stmt: Statement, stmt_fn: Optional[StmtFn], expr_fn: Optional[ExprFn]) -> Statement:
    def ex(e: Expression) -> Expression:
        return map_expr(e, expr_fn) if expr_fn is not None else e

    def bd(b: Body) -> Body:
        return map_body(b, stmt_fn, expr_fn)

    if isinstance(stmt, (Assign, LocalAssign)):
        return replace(stmt, value=ex(stmt.value))
    if isinstance(stmt, (Assume, Assert)):
        return replace(stmt, cond=ex(stmt.cond))
    if isinstance(stmt, If):
        return replace(stmt, branches=tuple((ex(g), bd(b)) for g, b in stmt.branches),
                       else_body=bd(stmt.else_body))
    if isinstance(stmt, Case):
        return replace(stmt, arms=tuple(replace(a, body=bd(a.body)) for a in stmt.arms),
                       default=None if stmt.default is None else bd(stmt.default))
    if isinstance(stmt, Loop):
        return replace(stmt, init=bd(stmt.init), exit_cond=ex(stmt.exit_cond), body=bd(stmt.body))
    if isinstance(stmt, Sequence):
        return replace(stmt, body=bd(stmt.body))
    return stmt


def flatten(body: Iterable[Statement]) -> Body:
    """Splice nested `Sequence` statements into their enclosing lists."""
    return map_body(body, stmt_fn=lambda s: s.body if isinstance(s, Sequence) else s)
