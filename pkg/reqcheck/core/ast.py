"""
Abstract syntax of the requirement language.

Every node is an immutable dataclass. Structural equality is dataclass
equality: source spans and annotation comments ride along on every node
but never take part in comparisons or hashing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Tuple, Union

if TYPE_CHECKING:
    from reqcheck.asm.rules import NamedRule
    from reqcheck.patterns.instance import PatternInstance


DURATION = "duration"
DEFAULT_STEP = "main"


@dataclass(frozen=True)
class SourceSpan:
    """A region of a source file; line and column are 1-based."""
    file: str
    line: int
    column: int
    length: int = 0

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError(f"span position must be 1-based, got {self.line}:{self.column}")
        if self.length < 0:
            raise ValueError("span length must be non-negative")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Symbol:
    """A symbolic constant such as `closed_position`."""
    name: str

    def __str__(self) -> str:
        return self.name


Value = Union[bool, int, Symbol]


def format_value(value: Value) -> str:
    """Render a value the way the `.req` syntax spells it."""
    if isinstance(value, bool):
        return "True" if value else "False"
    return str(value)


# ---------------------------------------------------------------- domains

@dataclass(frozen=True)
class SymbolicDomain:
    """An ordered, finite set of symbolic constants."""
    values: Tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("symbolic domain needs at least one value")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"symbolic domain has duplicate values: {', '.join(self.values)}")

    def contains(self, value: Value) -> bool:
        return isinstance(value, Symbol) and value.name in self.values

    def enumerate(self) -> Tuple[Symbol, ...]:
        return tuple(Symbol(v) for v in self.values)

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def default(self) -> Symbol:
        return Symbol(self.values[0])


@dataclass(frozen=True)
class IntegerDomain:
    """A closed integer interval [lo, hi]."""
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"integer domain is empty: {self.lo} .. {self.hi}")

    def contains(self, value: Value) -> bool:
        return isinstance(value, int) and not isinstance(value, bool) and self.lo <= value <= self.hi

    def enumerate(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def default(self) -> int:
        return 0 if self.contains(0) else self.lo


Domain = Union[SymbolicDomain, IntegerDomain]


class AttributeKind(str, Enum):
    """Who controls an attribute."""
    ENVIRONMENT = "env"
    MACHINE = "machine"
    GHOST = "ghost"


# ------------------------------------------------------------------ nodes

@dataclass(frozen=True)
class Node:
    """Common base: a source span and an annotation, both outside equality."""
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False, kw_only=True)
    annotation: str = field(default="", compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class AttributeDecl(Node):
    name: str
    domain: Domain
    kind: AttributeKind = AttributeKind.MACHINE


# ------------------------------------------------------------ expressions

@dataclass(frozen=True)
class Expression(Node):
    pass


@dataclass(frozen=True, eq=False)
class Literal(Expression):
    value: Value

    # bool is an int subclass, so the sort must take part in equality
    def _key(self):
        return (type(self.value).__name__, self.value)

    def __eq__(self, other):
        if not isinstance(other, Literal):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(("Literal",) + self._key())


@dataclass(frozen=True)
class AttrRef(Expression):
    name: str


@dataclass(frozen=True)
class LocalRef(Expression):
    name: str


@dataclass(frozen=True)
class OldRef(Expression):
    inner: Expression


@dataclass(frozen=True)
class Not(Expression):
    operand: Expression


class BinaryOp(str, Enum):
    AND = "and"
    OR = "or"
    IMPLIES = "implies"
    EQ = "="
    NEQ = "/="
    LE = "<="
    LT = "<"
    GE = ">="
    GT = ">"
    ADD = "+"
    SUB = "-"
    MAX = "max"
    MIN = "min"


BOOLEAN_OPS = frozenset({BinaryOp.AND, BinaryOp.OR, BinaryOp.IMPLIES})
EQUALITY_OPS = frozenset({BinaryOp.EQ, BinaryOp.NEQ})
ORDER_OPS = frozenset({BinaryOp.LE, BinaryOp.LT, BinaryOp.GE, BinaryOp.GT})
ARITHMETIC_OPS = frozenset({BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MAX, BinaryOp.MIN})


@dataclass(frozen=True)
class Binary(Expression):
    op: BinaryOp
    lhs: Expression
    rhs: Expression


def conjunction(parts: List[Expression]) -> Expression:
    """Left-nested `and` of the given expressions."""
    if not parts:
        return Literal(True)
    result = parts[0]
    for part in parts[1:]:
        result = Binary(BinaryOp.AND, result, part)
    return result


# ------------------------------------------------------------- statements

Body = Tuple["Statement", ...]


@dataclass(frozen=True)
class Statement(Node):
    pass


@dataclass(frozen=True)
class Assign(Statement):
    target: str
    value: Expression


@dataclass(frozen=True)
class LocalDecl(Statement):
    name: str
    domain: Domain


@dataclass(frozen=True)
class LocalAssign(Statement):
    name: str
    value: Expression


@dataclass(frozen=True)
class Assume(Statement):
    cond: Expression


@dataclass(frozen=True)
class Assert(Statement):
    cond: Expression


@dataclass(frozen=True)
class If(Statement):
    branches: Tuple[Tuple[Expression, Body], ...]
    else_body: Body = ()


@dataclass(frozen=True)
class CaseArm(Node):
    value: str
    body: Body


@dataclass(frozen=True)
class Case(Statement):
    scrutinee: str
    arms: Tuple[CaseArm, ...]
    default: Optional[Body] = None


@dataclass(frozen=True)
class Loop(Statement):
    init: Body
    exit_cond: Expression
    body: Body


@dataclass(frozen=True)
class Call(Statement):
    routine: str


@dataclass(frozen=True)
class Sequence(Statement):
    body: Body


# ------------------------------------------------------ routines and model

class RoutineRole(str, Enum):
    """Plant routines make up the machine; the other two are requirement text."""
    STEP = "step"
    ASSUMPTION = "assumption"
    REQUIREMENT = "requirement"


@dataclass(frozen=True)
class Routine(Node):
    name: str
    body: Body
    role: RoutineRole = RoutineRole.STEP


@dataclass(frozen=True)
class Model(Node):
    """
    A plant model together with its requirement routines.

    `rules` and `patterns` hold ASM rule and pattern declarations as parsed;
    `reqcheck.frontend.elaborate` turns them into routines.
    """
    name: str
    attributes: Tuple[AttributeDecl, ...] = ()
    routines: Tuple[Routine, ...] = ()
    step: Optional[str] = None
    rules: Tuple["NamedRule", ...] = ()
    patterns: Tuple["PatternInstance", ...] = ()

    @property
    def step_name(self) -> str:
        return self.step or DEFAULT_STEP

    @cached_property
    def _attribute_index(self) -> Dict[str, AttributeDecl]:
        return {a.name: a for a in self.attributes}

    @cached_property
    def _routine_index(self) -> Dict[str, Routine]:
        return {r.name: r for r in self.routines}

    def attribute(self, name: str) -> Optional[AttributeDecl]:
        return self._attribute_index.get(name)

    def routine(self, name: str) -> Optional[Routine]:
        return self._routine_index.get(name)

    def requirements(self) -> List[Routine]:
        return [r for r in self.routines if r.role is RoutineRole.REQUIREMENT]

    def symbolic_constants(self) -> Dict[str, List[SymbolicDomain]]:
        """Map every declared symbolic constant to the domains declaring it."""
        constants: Dict[str, List[SymbolicDomain]] = {}
        for attr in self.attributes:
            if isinstance(attr.domain, SymbolicDomain):
                for value in attr.domain.values:
                    domains = constants.setdefault(value, [])
                    if attr.domain not in domains:
                        domains.append(attr.domain)
        return constants

    def with_routines(self, routines: List[Routine]) -> "Model":
        return replace(self, routines=tuple(routines))

    def replace_routine(self, routine: Routine) -> "Model":
        return self.with_routines([routine if r.name == routine.name else r for r in self.routines])


def iter_bodies(stmt: Statement) -> Iterator[Body]:
    """Yield the nested statement lists of a statement."""
    if isinstance(stmt, If):
        for _, body in stmt.branches:
            yield body
        yield stmt.else_body
    elif isinstance(stmt, Case):
        for arm in stmt.arms:
            yield arm.body
        if stmt.default is not None:
            yield stmt.default
    elif isinstance(stmt, Loop):
        yield stmt.init
        yield stmt.body
    elif isinstance(stmt, Sequence):
        yield stmt.body
