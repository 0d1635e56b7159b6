"""Pattern instances: the parameters of one P1-P4 translation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from reqcheck.core.ast import Expression, Node, RoutineRole


class PatternKind(str, Enum):
    """P1/P3 are environment assumptions, P2/P4 machine obligations; P3/P4 are timed."""
    P1 = "p1"
    P2 = "p2"
    P3 = "p3"
    P4 = "p4"

    @property
    def timed(self) -> bool:
        return self in (PatternKind.P3, PatternKind.P4)

    @property
    def role(self) -> RoutineRole:
        if self in (PatternKind.P1, PatternKind.P3):
            return RoutineRole.ASSUMPTION
        return RoutineRole.REQUIREMENT


@dataclass(frozen=True)
class PatternInstance(Node):
    """
    One application of a translation pattern.

    `conditions` holds the conditions c of P1 (one assume each, in order) or
    the single property p of P2-P4. `t` is the time bound, present exactly
    for the timed patterns.
    """
    pattern: PatternKind
    name: str
    conditions: Tuple[Expression, ...]
    inner: str
    t: Optional[int] = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("pattern instance needs a routine name")
        if not self.inner:
            raise ValueError("pattern instance needs an inner routine")
        if self.pattern.timed:
            if self.t is None:
                raise ValueError(f"{self.pattern.value} needs a time bound")
            if isinstance(self.t, bool) or self.t < 0:
                raise ValueError(f"time bound must be a nonnegative integer, got {self.t}")
        elif self.t is not None:
            raise ValueError(f"{self.pattern.value} takes no time bound")
        if self.pattern is PatternKind.P1:
            if len(self.conditions) < 1:
                raise ValueError("p1 needs at least one condition")
        elif len(self.conditions) != 1:
            raise ValueError(f"{self.pattern.value} takes exactly one property, got {len(self.conditions)}")

    @property
    def prop(self) -> Expression:
        return self.conditions[0]
