"""
Brute-force reference simulator.

A second, plain interpreter used to cross-check the engine: it
works on dictionaries, evaluates expressions itself, and reports results as
return values. Loop bound and cycle semantics match the engine's.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from reqcheck.core.ast import (
    Assert, Assign, Assume, AttrRef, Binary, BinaryOp, Call, Case, If,
    Literal, LocalAssign, LocalDecl, LocalRef, Loop, Model, Not, OldRef,
    Sequence, Symbol,
)

COMPLETED = "completed"
ASSUME_VIOLATED = "assume_violated"
ASSERT_FAILED = "assert_failed"
DIVERGED = "diverged"
BOUND_EXCEEDED = "bound_exceeded"


@dataclass(frozen=True)
class SimResult:
    kind: str
    final: Dict[str, object]


def _value(expr, state: dict, entry: dict, local: dict, old: bool = False):
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, AttrRef):
        return entry[expr.name] if old else state[expr.name]
    if isinstance(expr, LocalRef):
        return local[expr.name]
    if isinstance(expr, OldRef):
        return _value(expr.inner, state, entry, local, True)
    if isinstance(expr, Not):
        return not _value(expr.operand, state, entry, local, old)
    op = expr.op
    a = _value(expr.lhs, state, entry, local, old)
    if op is BinaryOp.AND:
        return a and _value(expr.rhs, state, entry, local, old)
    if op is BinaryOp.OR:
        return a or _value(expr.rhs, state, entry, local, old)
    if op is BinaryOp.IMPLIES:
        return (not a) or _value(expr.rhs, state, entry, local, old)
    b = _value(expr.rhs, state, entry, local, old)
    return {
        BinaryOp.EQ: lambda: a == b,
        BinaryOp.NEQ: lambda: a != b,
        BinaryOp.LE: lambda: a <= b,
        BinaryOp.LT: lambda: a < b,
        BinaryOp.GE: lambda: a >= b,
        BinaryOp.GT: lambda: a > b,
        BinaryOp.ADD: lambda: a + b,
        BinaryOp.SUB: lambda: a - b,
        BinaryOp.MAX: lambda: max(a, b),
        BinaryOp.MIN: lambda: min(a, b),
    }[op]()


class _Simulator:
    def __init__(self, model: Model, unroll_bound: int, detect_cycles: bool):
        self.model = model
        self.unroll_bound = unroll_bound
        self.detect_cycles = detect_cycles

    def routine(self, name: str, state: dict) -> Optional[str]:
        entry = dict(state)
        return self.block(self.model.routine(name).body, state, entry, {})

    def block(self, body, state: dict, entry: dict, local: dict) -> Optional[str]:
        for stmt in body:
            status = self.stmt(stmt, state, entry, local)
            if status is not None:
                return status
        return None

    def stmt(self, stmt, state: dict, entry: dict, local: dict) -> Optional[str]:
        if isinstance(stmt, Assign):
            state[stmt.target] = _value(stmt.value, state, entry, local)
        elif isinstance(stmt, LocalDecl):
            local[stmt.name] = stmt.domain.default
        elif isinstance(stmt, LocalAssign):
            local[stmt.name] = _value(stmt.value, state, entry, local)
        elif isinstance(stmt, Assume):
            if not _value(stmt.cond, state, entry, local):
                return ASSUME_VIOLATED
        elif isinstance(stmt, Assert):
            if not _value(stmt.cond, state, entry, local):
                return ASSERT_FAILED
        elif isinstance(stmt, If):
            for guard, body in stmt.branches:
                if _value(guard, state, entry, local):
                    return self.block(body, state, entry, local)
            return self.block(stmt.else_body, state, entry, local)
        elif isinstance(stmt, Case):
            for arm in stmt.arms:
                if state[stmt.scrutinee] == Symbol(arm.value):
                    return self.block(arm.body, state, entry, local)
            if stmt.default is not None:
                return self.block(stmt.default, state, entry, local)
        elif isinstance(stmt, Loop):
            return self.loop(stmt, state, entry, local)
        elif isinstance(stmt, Call):
            return self.routine(stmt.routine, state)
        elif isinstance(stmt, Sequence):
            return self.block(stmt.body, state, entry, local)
        return None

    def loop(self, loop: Loop, state: dict, entry: dict, local: dict) -> Optional[str]:
        status = self.block(loop.init, state, entry, local)
        if status is not None:
            return status
        seen = set()
        runs = 1
        while True:
            snapshot: Tuple = (tuple(state.items()), tuple(sorted(local.items())))
            if self.detect_cycles and snapshot in seen:
                return DIVERGED
            seen.add(snapshot)
            if _value(loop.exit_cond, state, entry, local):
                return None
            if runs >= self.unroll_bound:
                return BOUND_EXCEEDED
            status = self.block(loop.body, state, entry, local)
            if status is not None:
                return status
            runs += 1


def simulate(model: Model, routine: str, initial: Dict[str, object],
             unroll_bound: int = 64, detect_cycles: bool = True) -> SimResult:
    """Run `routine` from a copy of `initial` and report how the run ended."""
    state = dict(initial)
    status = _Simulator(model, unroll_bound, detect_cycles).routine(routine, state)
    return SimResult(status or COMPLETED, state)
