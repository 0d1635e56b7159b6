"""
Parser for `.req` sources.

The grammar lives next to this module in `grammar.lark` and is compiled once
into an LALR parser. Parsing is a pure function of the input text: comments
are collected by a separate scan and attached as annotations, and bare names
are resolved against the model once the whole file has been read.
"""

from __future__ import annotations

import bisect
import logging
import re
from dataclasses import dataclass, replace
from typing import Dict, List, NamedTuple, Optional, Set, Tuple

from lark import Lark, Transformer, Tree, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from reqcheck.asm.rules import (
    Cond, NamedRule, Par, RuleRef, Skip, Switch, SwitchArm, Update, map_rule_exprs,
)
from reqcheck.core.ast import (
    Assert, Assign, Assume, AttrRef, AttributeDecl, AttributeKind, Binary,
    BinaryOp, Call, Case, CaseArm, Expression, If, IntegerDomain, Literal,
    LocalAssign, LocalDecl, LocalRef, Loop, Model, Not, OldRef, Routine,
    RoutineRole, SourceSpan, Statement, Symbol, SymbolicDomain,
)
from reqcheck.core.visit import ExprFn, iter_statements, map_body, map_expr
from reqcheck.errors import ParseError
from reqcheck.frontend.diagnostics import ParseDiagnostic
from reqcheck.patterns.instance import PatternInstance, PatternKind

logger = logging.getLogger(__name__)

_PARSER = Lark.open(
    "grammar.lark",
    rel_to=__file__,
    parser="lalr",
    lexer="basic",
    propagate_positions=True,
    start=["start", "expr", "routine"],
)

_COMMENT = re.compile(r"--([^\n]*)")

_ANNOTATABLE = frozenset({
    "attribute", "step_decl", "routine", "rule_decl", "pattern_decl",
    "assign", "local_decl", "assume", "assert_", "if_stmt", "case_stmt",
    "loop_stmt", "call",
})

_BLOCK_OPENERS = frozenset({"do", "assume", "assert", "check", "if", "case", "from", "par", "pattern"})


# ------------------------------------------------------------------ helpers

class _SyntaxProblem(Exception):
    def __init__(self, span: Optional[SourceSpan], message: str):
        super().__init__(message)
        self.span = span
        self.message = message


class _Branch(NamedTuple):
    guard: Expression
    body: Tuple[Statement, ...]


class _Else(NamedTuple):
    body: Tuple[Statement, ...]


class _AsmElse(NamedTuple):
    rule: object


class _Within(NamedTuple):
    t: int


class _Location(NamedTuple):
    name: str
    args: Tuple[Expression, ...]


@dataclass(frozen=True)
class _StepDecl:
    name: str
    span: Optional[SourceSpan]


@v_args(meta=True)
class _ReqTransformer(Transformer):
    """Turns the lark parse tree into core-ir nodes (names still unresolved)."""

    def __init__(self, filename: str, annotations: Dict[int, Tuple[str, str]]):
        super().__init__()
        self._filename = filename
        self._annotations = annotations

    def _span(self, meta) -> Optional[SourceSpan]:
        if getattr(meta, "empty", True):
            return None
        return SourceSpan(self._filename, meta.line, meta.column, meta.end_pos - meta.start_pos)

    def _kw(self, meta, data: str) -> dict:
        kw = {"span": self._span(meta)}
        if not getattr(meta, "empty", True):
            anchored = self._annotations.get(meta.start_pos)
            if anchored is not None and anchored[0] == data:
                kw["annotation"] = anchored[1]
        return kw

    # declarations

    def start(self, meta, children):
        (name, span), items = children[0], children[1:]
        attributes, routines, rules, patterns = [], [], [], []
        step: Optional[_StepDecl] = None
        for item in items:
            if isinstance(item, AttributeDecl):
                attributes.append(item)
            elif isinstance(item, Routine):
                routines.append(item)
            elif isinstance(item, NamedRule):
                rules.append(item)
            elif isinstance(item, PatternInstance):
                patterns.append(item)
            elif isinstance(item, _StepDecl):
                if step is not None:
                    raise _SyntaxProblem(item.span, "the step routine is declared twice")
                step = item
        return Model(name, tuple(attributes), tuple(routines), step.name if step else None,
                     tuple(rules), tuple(patterns), span=span)

    def model_header(self, meta, children):
        return str(children[0]), self._span(meta)

    def attribute(self, meta, children):
        kind = AttributeKind.MACHINE
        if isinstance(children[0], AttributeKind):
            kind, children = children[0], children[1:]
        return AttributeDecl(str(children[0]), children[1], kind, **self._kw(meta, "attribute"))

    def attr_kind(self, meta, children):
        return AttributeKind(str(children[0]))

    def symbolic_domain(self, meta, children):
        try:
            return SymbolicDomain(tuple(str(c) for c in children))
        except ValueError as exc:
            raise _SyntaxProblem(self._span(meta), str(exc)) from None

    def integer_domain(self, meta, children):
        try:
            return IntegerDomain(children[0], children[1])
        except ValueError as exc:
            raise _SyntaxProblem(self._span(meta), str(exc)) from None

    def signed_int(self, meta, children):
        return int("".join(str(c) for c in children))

    def step_decl(self, meta, children):
        return _StepDecl(str(children[0]), self._span(meta))

    def routine(self, meta, children):
        name, rest = str(children[0]), children[1:]
        role = RoutineRole.STEP
        if isinstance(rest[0], RoutineRole):
            role, rest = rest[0], rest[1:]
        return Routine(name, rest[0], role, **self._kw(meta, "routine"))

    def routine_role(self, meta, children):
        return RoutineRole(str(children[0]))

    def pattern_decl(self, meta, children):
        kind, name, inner = (str(c) for c in children[:3])
        rest = children[3:]
        t = None
        if rest and isinstance(rest[0], _Within):
            t, rest = rest[0].t, rest[1:]
        try:
            return PatternInstance(PatternKind(kind.lower()), name, tuple(rest), inner, t,
                                   **self._kw(meta, "pattern_decl"))
        except ValueError as exc:
            message = f"unknown pattern '{kind}'" if kind.lower() not in {k.value for k in PatternKind} else str(exc)
            raise _SyntaxProblem(self._span(meta), message) from None

    def within(self, meta, children):
        return _Within(children[0])

    def where(self, meta, children):
        return children[0]

    # statements

    def block(self, meta, children):
        return tuple(children)

    def assign(self, meta, children):
        return Assign(str(children[0]), children[1], **self._kw(meta, "assign"))

    def local_decl(self, meta, children):
        return LocalDecl(str(children[0]), children[1], **self._kw(meta, "local_decl"))

    def assume(self, meta, children):
        return Assume(children[0], **self._kw(meta, "assume"))

    def assert_(self, meta, children):
        return Assert(children[0], **self._kw(meta, "assert_"))

    def if_stmt(self, meta, children):
        branches = [(children[0], children[1])]
        else_body: Tuple[Statement, ...] = ()
        for part in children[2:]:
            if isinstance(part, _Branch):
                branches.append((part.guard, part.body))
            else:
                else_body = part.body
        return If(tuple(branches), else_body, **self._kw(meta, "if_stmt"))

    def elseif_part(self, meta, children):
        return _Branch(children[0], children[1])

    def else_part(self, meta, children):
        return _Else(children[0])

    def case_stmt(self, meta, children):
        arms = tuple(c for c in children[1:] if isinstance(c, CaseArm))
        default = next((c.body for c in children[1:] if isinstance(c, _Else)), None)
        return Case(str(children[0]), arms, default, **self._kw(meta, "case_stmt"))

    def when_arm(self, meta, children):
        return CaseArm(str(children[0]), children[1], span=self._span(meta))

    def loop_stmt(self, meta, children):
        return Loop(children[0], children[1], children[2], **self._kw(meta, "loop_stmt"))

    def call(self, meta, children):
        return Call(str(children[0]), **self._kw(meta, "call"))

    # ASM rules

    def rule_decl(self, meta, children):
        return NamedRule(str(children[0]), children[1], **self._kw(meta, "rule_decl"))

    def update(self, meta, children):
        location = children[0]
        return Update(location.name, children[1], location.args, span=self._span(meta))

    def location(self, meta, children):
        return _Location(str(children[0]), tuple(children[1:]))

    def skip(self, meta, children):
        return Skip(span=self._span(meta))

    def par(self, meta, children):
        return Par(tuple(children), span=self._span(meta))

    def cond(self, meta, children):
        else_rule = children[2].rule if len(children) > 2 else None
        return Cond(children[0], children[1], else_rule, span=self._span(meta))

    def switch(self, meta, children):
        arms = tuple(c for c in children[1:] if isinstance(c, SwitchArm))
        default = next((c.rule for c in children[1:] if isinstance(c, _AsmElse)), None)
        return Switch(str(children[0]), arms, default, span=self._span(meta))

    def asm_arm(self, meta, children):
        return SwitchArm(str(children[0]), children[1], span=self._span(meta))

    def asm_else(self, meta, children):
        return _AsmElse(children[0])

    def rule_ref(self, meta, children):
        return RuleRef(str(children[0]), span=self._span(meta))

    # expressions

    def _binary(self, op, meta, children):
        return Binary(op, children[0], children[1], span=self._span(meta))

    def implies(self, meta, children):
        return self._binary(BinaryOp.IMPLIES, meta, children)

    def or_(self, meta, children):
        return self._binary(BinaryOp.OR, meta, children)

    def and_(self, meta, children):
        return self._binary(BinaryOp.AND, meta, children)

    def eq(self, meta, children):
        return self._binary(BinaryOp.EQ, meta, children)

    def neq(self, meta, children):
        return self._binary(BinaryOp.NEQ, meta, children)

    def le(self, meta, children):
        return self._binary(BinaryOp.LE, meta, children)

    def lt(self, meta, children):
        return self._binary(BinaryOp.LT, meta, children)

    def ge(self, meta, children):
        return self._binary(BinaryOp.GE, meta, children)

    def gt(self, meta, children):
        return self._binary(BinaryOp.GT, meta, children)

    def add(self, meta, children):
        return self._binary(BinaryOp.ADD, meta, children)

    def sub(self, meta, children):
        return self._binary(BinaryOp.SUB, meta, children)

    def max_(self, meta, children):
        return self._binary(BinaryOp.MAX, meta, children)

    def min_(self, meta, children):
        return self._binary(BinaryOp.MIN, meta, children)

    def not_(self, meta, children):
        return Not(children[0], span=self._span(meta))

    def old(self, meta, children):
        return OldRef(children[0], span=self._span(meta))

    def int_lit(self, meta, children):
        return Literal(int(children[0]), span=self._span(meta))

    def neg_int(self, meta, children):
        return Literal(-int(children[0]), span=self._span(meta))

    def true(self, meta, children):
        return Literal(True, span=self._span(meta))

    def false(self, meta, children):
        return Literal(False, span=self._span(meta))

    def name(self, meta, children):
        return AttrRef(str(children[0]), span=self._span(meta))


# ---------------------------------------------------------------- comments

def _collect_annotations(text: str, tree: Tree) -> Dict[int, Tuple[str, str]]:
    """Map the start offset of each annotated node to (rule name, comment text)."""
    anchors: Dict[int, Tree] = {}
    for sub in tree.iter_subtrees_topdown():
        if sub.data in _ANNOTATABLE and not sub.meta.empty and sub.meta.start_pos not in anchors:
            anchors[sub.meta.start_pos] = sub
    positions = sorted(anchors)
    header_lines = {t.meta.line: t for t in anchors.values() if t.data == "routine"}

    texts: Dict[int, List[str]] = {}
    for match in _COMMENT.finditer(text):
        pos = match.start()
        line = text.count("\n", 0, pos) + 1
        routine = header_lines.get(line)
        if routine is not None and routine.meta.start_pos < pos:
            target = routine.meta.start_pos
        else:
            index = bisect.bisect_right(positions, pos)
            if index == len(positions):
                logger.warning(f"Dropping comment at line {line} with nothing after it to annotate")
                continue
            target = positions[index]
        texts.setdefault(target, []).append(match.group(1).strip())
    return {pos: (str(anchors[pos].data), "\n".join(lines)) for pos, lines in texts.items()}


# ----------------------------------------------------------- name resolution

def _resolver(model: Optional[Model], local_names: Set[str]) -> ExprFn:
    constants = model.symbolic_constants() if model is not None else {}

    def resolve(expr: Expression) -> Expression:
        if isinstance(expr, AttrRef):
            if expr.name in local_names:
                return LocalRef(expr.name, span=expr.span)
            if model is not None and model.attribute(expr.name) is not None:
                return expr
            if expr.name in constants:
                return Literal(Symbol(expr.name), span=expr.span)
        return expr

    return resolve


def _resolve_routine(routine: Routine, model: Optional[Model]) -> Routine:
    local_names = {s.name for s in iter_statements(routine.body) if isinstance(s, LocalDecl)}

    def to_local(stmt: Statement) -> Statement:
        if isinstance(stmt, Assign) and stmt.target in local_names:
            return LocalAssign(stmt.target, stmt.value, span=stmt.span, annotation=stmt.annotation)
        return stmt

    return replace(routine, body=map_body(routine.body, to_local, _resolver(model, local_names)))


def _resolve_model(model: Model) -> Model:
    resolve = _resolver(model, set())
    return replace(
        model,
        routines=tuple(_resolve_routine(r, model) for r in model.routines),
        rules=tuple(replace(r, body=map_rule_exprs(r.body, resolve)) for r in model.rules),
        patterns=tuple(replace(p, conditions=tuple(map_expr(c, resolve) for c in p.conditions))
                       for p in model.patterns),
    )


# ------------------------------------------------------------------- errors

def _diagnostic_at(filename: str, line: int, column: int, message: str, length: int = 0) -> ParseDiagnostic:
    return ParseDiagnostic(SourceSpan(filename, max(line, 1), max(column, 1), length), message)


def _unbalanced_block(text: str, filename: str) -> Optional[ParseDiagnostic]:
    """Match block openers against `end`; report the innermost unclosed opener."""
    stack = []
    previous = None
    try:
        for token in _PARSER.lex(text):
            value = str(token)
            if token.type != "NAME":
                if value in _BLOCK_OPENERS and not (value == "assume" and previous == "check"):
                    stack.append(token)
                elif value == "end":
                    if not stack:
                        return _diagnostic_at(filename, token.line, token.column,
                                              "'end' does not close any block", 3)
                    stack.pop()
            previous = value
    except UnexpectedInput:
        pass
    if stack:
        token = stack[-1]
        return _diagnostic_at(filename, token.line, token.column,
                              f"'{token}' block is never closed by 'end'", len(str(token)))
    return None


def _end_position(text: str) -> Tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def _syntax_diagnostic(text: str, exc: UnexpectedInput, filename: str) -> ParseDiagnostic:
    unbalanced = _unbalanced_block(text, filename)
    if unbalanced is not None:
        return unbalanced
    if isinstance(exc, UnexpectedEOF) or getattr(exc, "line", -1) < 1:
        line, column = _end_position(text)
        return _diagnostic_at(filename, line, column, "unexpected end of input")
    if isinstance(exc, UnexpectedCharacters):
        char = text[exc.pos_in_stream] if 0 <= exc.pos_in_stream < len(text) else "?"
        return _diagnostic_at(filename, exc.line, exc.column, f"unexpected character {char!r}", 1)
    token = getattr(exc, "token", None)
    if token is not None and token.type == "$END":
        line, column = _end_position(text)
        return _diagnostic_at(filename, line, column, "unexpected end of input")
    return _diagnostic_at(filename, exc.line, exc.column, f"unexpected {str(token)!r}",
                          len(str(token)) if token is not None else 0)


def _parse(text: str, start: str, filename: str):
    try:
        tree = _PARSER.parse(text, start=start)
    except UnexpectedInput as exc:
        raise ParseError([_syntax_diagnostic(text, exc, filename)]) from None
    annotations = _collect_annotations(text, tree) if start != "expr" else {}
    try:
        return _ReqTransformer(filename, annotations).transform(tree)
    except VisitError as exc:
        problem = exc.orig_exc
        if isinstance(problem, _SyntaxProblem):
            span = problem.span or SourceSpan(filename, 1, 1)
            raise ParseError([ParseDiagnostic(span, problem.message)]) from None
        raise


# ---------------------------------------------------------------------- API

def parse_model(text: str, filename: str = "<string>") -> Model:
    """
    Parse a complete `.req` source into a model.

    Rule and pattern declarations are kept as parsed; see
    `reqcheck.frontend.elaborate` for turning them into routines.

    Raises:
        ParseError: With a single diagnostic for the first error found.
    """
    model = _resolve_model(_parse(text, "start", filename))
    logger.debug(f"Parsed model {model.name}: {len(model.attributes)} attributes, "
                 f"{len(model.routines)} routines, {len(model.rules)} rules, {len(model.patterns)} patterns")
    return model


def parse_expression(text: str, context: Optional[Model] = None) -> Expression:
    """Parse an expression; names resolve against `context` when given."""
    expr = _parse(text, "expr", "<expression>")
    return map_expr(expr, _resolver(context, set()))


def parse_routine(text: str, context: Optional[Model] = None) -> Routine:
    """Parse a single routine declaration; names resolve against `context` when given."""
    return _resolve_routine(_parse(text, "routine", "<routine>"), context)
