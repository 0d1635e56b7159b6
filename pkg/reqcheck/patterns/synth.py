"""
Synthesis of assumption and requirement routines from the four translation patterns.

    p1  run under conditions c:      assume c end ... ; inner
    p2  immediately meet p:          inner ; assert p end
    p3  from not p to p takes t:     inner ; if not old (p) and p then duration := duration + t end
    p4  meet p within t:             from inner until p or duration - old duration > t loop inner end ;
                                     assert p end ; assert duration - old duration <= t end
"""

from __future__ import annotations

import logging
from typing import Optional

from reqcheck.core.ast import (
    BOOLEAN_OPS, DURATION, EQUALITY_OPS, ORDER_OPS, Assert, Assign, Assume,
    AttrRef, Binary, BinaryOp, Call, Expression, If, Literal, Loop, Model,
    Not, OldRef, Routine, RoutineRole,
)
from reqcheck.core.visit import walk_expr
from reqcheck.core.wellformed import condition_diagnostics
from reqcheck.errors import PatternError
from reqcheck.patterns.instance import PatternInstance, PatternKind

logger = logging.getLogger(__name__)

_ELAPSED = Binary(BinaryOp.SUB, AttrRef(DURATION), OldRef(AttrRef(DURATION)))


def annotation_for(instance: PatternInstance) -> str:
    """The instance's own annotation, or the pattern's comment template."""
    if instance.annotation:
        return instance.annotation
    if instance.pattern is PatternKind.P1:
        return "Assume the system"
    if instance.pattern is PatternKind.P2:
        return "Require the system to"
    if instance.pattern is PatternKind.P3:
        return f"Assume it takes {instance.t} time units to take the system"
    return f"Require that {instance.name} never takes more than {instance.t} time units"


def _looks_boolean(expr: Expression) -> bool:
    if isinstance(expr, Literal):
        return isinstance(expr.value, bool)
    if isinstance(expr, Not):
        return True
    if isinstance(expr, Binary):
        return expr.op in BOOLEAN_OPS or expr.op in EQUALITY_OPS or expr.op in ORDER_OPS
    if isinstance(expr, OldRef):
        return _looks_boolean(expr.inner)
    # bare names: sort unknown without a model
    return True


def _validate(instance: PatternInstance, model: Optional[Model]):
    if model is not None:
        inner = model.routine(instance.inner)
        if inner is None:
            raise PatternError(f"{instance.name}: unknown inner routine '{instance.inner}'")
        if inner.role not in (RoutineRole.STEP, RoutineRole.ASSUMPTION):
            raise PatternError(f"{instance.name}: inner routine '{instance.inner}' is a "
                               f"{inner.role.value} routine; expected a step or assumption routine")
    for condition in instance.conditions:
        if model is not None:
            problems = condition_diagnostics(model, condition)
            if problems:
                raise PatternError(f"{instance.name}: {problems[0].message}")
        elif not _looks_boolean(condition):
            raise PatternError(f"{instance.name}: condition is not boolean")
    if instance.pattern is PatternKind.P3 and any(isinstance(e, OldRef) for e in walk_expr(instance.prop)):
        raise PatternError(f"{instance.name}: a p3 property cannot contain 'old'")


def synth(instance: PatternInstance, model: Optional[Model] = None) -> Routine:
    """
    Build the routine a pattern instance stands for.

    Args:
        instance (PatternInstance): The pattern, its conditions, inner routine and bound.
        model (Model, optional): When given, the inner routine must exist in it
            with role step or assumption, and conditions must be boolean under
            its attributes. Without a model only the shape of each condition is
            checked.

    Returns:
        Routine: Role assumption for p1/p3, requirement for p2/p4.

    Raises:
        PatternError: Unknown inner routine or a non-boolean condition,
            or a p3 property using `old`.
    """
    _validate(instance, model)
    call = Call(instance.inner)
    kind = instance.pattern
    if kind is PatternKind.P1:
        body = tuple(Assume(c) for c in instance.conditions) + (call,)
    elif kind is PatternKind.P2:
        body = (call, Assert(instance.prop))
    elif kind is PatternKind.P3:
        p = instance.prop
        guard = Binary(BinaryOp.AND, Not(OldRef(p)), p)
        tick = Assign(DURATION, Binary(BinaryOp.ADD, AttrRef(DURATION), Literal(instance.t)))
        body = (call, If(((guard, (tick,)),)))
    else:
        p, bound = instance.prop, Literal(instance.t)
        loop = Loop((call,), Binary(BinaryOp.OR, p, Binary(BinaryOp.GT, _ELAPSED, bound)), (call,))
        body = (loop, Assert(p), Assert(Binary(BinaryOp.LE, _ELAPSED, bound)))
    logger.debug(f"Synthesized {kind.value} routine {instance.name}")
    return Routine(instance.name, body, kind.role, span=instance.span, annotation=annotation_for(instance))


def _time_bound(expr: Expression) -> Optional[int]:
    if isinstance(expr, Literal) and isinstance(expr.value, int) and not isinstance(expr.value, bool):
        return expr.value if expr.value >= 0 else None
    return None


def _instance(kind: PatternKind, routine: Routine, conditions, inner: str,
              t: Optional[int] = None) -> Optional[PatternInstance]:
    if routine.role is not kind.role:
        return None
    return PatternInstance(kind, routine.name, tuple(conditions), inner, t, annotation=routine.annotation)


def match(routine: Routine) -> Optional[PatternInstance]:
    """
    Recognize a routine written in the shape of one of the patterns.

    Returns:
        PatternInstance | None: An instance with `synth(match(r)) == r`
        structurally, or None when the routine fits no pattern.
    """
    body = routine.body
    if not body:
        return None

    if isinstance(body[-1], Call) and len(body) >= 2 and all(isinstance(s, Assume) for s in body[:-1]):
        return _instance(PatternKind.P1, routine, [s.cond for s in body[:-1]], body[-1].routine)

    if len(body) == 2 and isinstance(body[0], Call):
        inner, second = body[0].routine, body[1]
        if isinstance(second, Assert):
            return _instance(PatternKind.P2, routine, [second.cond], inner)
        if isinstance(second, If) and len(second.branches) == 1 and not second.else_body:
            guard, then = second.branches[0]
            if not (isinstance(guard, Binary) and guard.op is BinaryOp.AND
                    and guard.lhs == Not(OldRef(guard.rhs))):
                return None
            if len(then) != 1 or not isinstance(then[0], Assign) or then[0].target != DURATION:
                return None
            tick = then[0].value
            if not (isinstance(tick, Binary) and tick.op is BinaryOp.ADD and tick.lhs == AttrRef(DURATION)):
                return None
            t = _time_bound(tick.rhs)
            if t is None:
                return None
            return _instance(PatternKind.P3, routine, [guard.rhs], inner, t)
        return None

    if len(body) == 3 and isinstance(body[0], Loop) and isinstance(body[1], Assert) and isinstance(body[2], Assert):
        loop, reached, within = body
        if len(loop.init) != 1 or not isinstance(loop.init[0], Call) or loop.body != loop.init:
            return None
        exit_cond, p = loop.exit_cond, reached.cond
        if not (isinstance(exit_cond, Binary) and exit_cond.op is BinaryOp.OR and exit_cond.lhs == p):
            return None
        timeout = exit_cond.rhs
        if not (isinstance(timeout, Binary) and timeout.op is BinaryOp.GT and timeout.lhs == _ELAPSED):
            return None
        t = _time_bound(timeout.rhs)
        if t is None or within.cond != Binary(BinaryOp.LE, _ELAPSED, Literal(t)):
            return None
        return _instance(PatternKind.P4, routine, [p], loop.init[0].routine, t)

    return None
