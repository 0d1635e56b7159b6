"""Expression evaluation against a routine activation frame."""

from __future__ import annotations

import operator

from reqcheck.core.ast import (
    ARITHMETIC_OPS, BOOLEAN_OPS, EQUALITY_OPS, ORDER_OPS, AttrRef, Binary,
    BinaryOp, Expression, Literal, LocalRef, Not, OldRef, Value,
)
from reqcheck.core.state import Frame
from reqcheck.errors import IllFormedExpressionError

_COMPARE = {
    BinaryOp.EQ: operator.eq,
    BinaryOp.NEQ: operator.ne,
    BinaryOp.LE: operator.le,
    BinaryOp.LT: operator.lt,
    BinaryOp.GE: operator.ge,
    BinaryOp.GT: operator.gt,
}

_ARITHMETIC = {
    BinaryOp.ADD: operator.add,
    BinaryOp.SUB: operator.sub,
    BinaryOp.MAX: max,
    BinaryOp.MIN: min,
}


def eval_expr(expr: Expression, frame: Frame) -> Value:
    """
    Evaluate an expression in a frame.

    `old` subtrees read the frame's entry snapshot; everything else reads the
    current state and the frame's locals.

    Args:
        expr (Expression): The expression to evaluate.
        frame (Frame): The routine activation to evaluate in.

    Returns:
        Value: A bool, an int or a Symbol.

    Raises:
        IllFormedExpressionError: On unbound names or mixed sorts. Only
            reachable for models that did not pass `well_formed`.
    """
    return _eval(expr, frame, False)


def eval_bool(expr: Expression, frame: Frame) -> bool:
    return _as_bool(_eval(expr, frame, False), expr)


def _eval(expr: Expression, frame: Frame, in_old: bool) -> Value:
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, AttrRef):
        state = frame.entry_snapshot if in_old else frame.current
        try:
            return state[expr.name]
        except KeyError:
            raise IllFormedExpressionError(f"unbound attribute '{expr.name}'") from None
    if isinstance(expr, LocalRef):
        if in_old:
            raise IllFormedExpressionError(f"local '{expr.name}' has no value on routine entry")
        try:
            return frame.locals[expr.name]
        except KeyError:
            raise IllFormedExpressionError(f"unbound local '{expr.name}'") from None
    if isinstance(expr, OldRef):
        if in_old:
            raise IllFormedExpressionError("'old' cannot be nested")
        return _eval(expr.inner, frame, True)
    if isinstance(expr, Not):
        return not _as_bool(_eval(expr.operand, frame, in_old), expr.operand)
    if isinstance(expr, Binary):
        return _eval_binary(expr, frame, in_old)
    raise IllFormedExpressionError(f"cannot evaluate {type(expr).__name__}")


def _eval_binary(expr: Binary, frame: Frame, in_old: bool) -> Value:
    op = expr.op
    if op in BOOLEAN_OPS:
        lhs = _as_bool(_eval(expr.lhs, frame, in_old), expr.lhs)
        if op is BinaryOp.AND:
            return lhs and _as_bool(_eval(expr.rhs, frame, in_old), expr.rhs)
        if op is BinaryOp.OR:
            return lhs or _as_bool(_eval(expr.rhs, frame, in_old), expr.rhs)
        return (not lhs) or _as_bool(_eval(expr.rhs, frame, in_old), expr.rhs)

    lhs = _eval(expr.lhs, frame, in_old)
    rhs = _eval(expr.rhs, frame, in_old)
    if op in EQUALITY_OPS:
        if type(lhs) is not type(rhs):
            raise IllFormedExpressionError(
                f"cannot compare {type(lhs).__name__} with {type(rhs).__name__} using '{op.value}'")
        return _COMPARE[op](lhs, rhs)
    if op in ORDER_OPS:
        return _COMPARE[op](_as_int(lhs, expr.lhs), _as_int(rhs, expr.rhs))
    if op in ARITHMETIC_OPS:
        return _ARITHMETIC[op](_as_int(lhs, expr.lhs), _as_int(rhs, expr.rhs))
    raise IllFormedExpressionError(f"unknown operator {op!r}")


def _as_bool(value: Value, expr: Expression) -> bool:
    if not isinstance(value, bool):
        raise IllFormedExpressionError(f"expected a boolean, got {value!s}")
    return value


def _as_int(value: Value, expr: Expression) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise IllFormedExpressionError(f"expected an integer, got {value!s}")
    return value
