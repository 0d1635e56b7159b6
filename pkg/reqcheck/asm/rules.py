"""Basic (deterministic) ASM rules over nullary locations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Tuple

from reqcheck.core.ast import Expression, Node
from reqcheck.core.visit import ExprFn, map_expr


@dataclass(frozen=True)
class AsmRule(Node):
    pass


@dataclass(frozen=True)
class Update(AsmRule):
    """`location := value`; `args` is non-empty only for n-ary locations."""
    location: str
    value: Expression
    args: Tuple[Expression, ...] = ()


@dataclass(frozen=True)
class Par(AsmRule):
    rules: Tuple[AsmRule, ...]


@dataclass(frozen=True)
class Cond(AsmRule):
    guard: Expression
    then_rule: AsmRule
    else_rule: Optional[AsmRule] = None


@dataclass(frozen=True)
class SwitchArm(Node):
    value: str
    rule: AsmRule


@dataclass(frozen=True)
class Switch(AsmRule):
    scrutinee: str
    arms: Tuple[SwitchArm, ...]
    default: Optional[AsmRule] = None


@dataclass(frozen=True)
class RuleRef(AsmRule):
    name: str


@dataclass(frozen=True)
class Skip(AsmRule):
    pass


@dataclass(frozen=True)
class NamedRule(Node):
    name: str
    body: AsmRule


def iter_rules(rule: AsmRule) -> Iterator[AsmRule]:
    """Pre-order walk over a rule and its sub-rules."""
    yield rule
    if isinstance(rule, Par):
        for sub in rule.rules:
            yield from iter_rules(sub)
    elif isinstance(rule, Cond):
        yield from iter_rules(rule.then_rule)
        if rule.else_rule is not None:
            yield from iter_rules(rule.else_rule)
    elif isinstance(rule, Switch):
        for arm in rule.arms:
            yield from iter_rules(arm.rule)
        if rule.default is not None:
            yield from iter_rules(rule.default)


def rule_references(rule: AsmRule) -> List[str]:
    return [r.name for r in iter_rules(rule) if isinstance(r, RuleRef)]


def map_rule_exprs(rule: AsmRule, fn: ExprFn) -> AsmRule:
    """Rebuild a rule with `fn` applied to every expression node."""
    if isinstance(rule, Update):
        return replace(rule, value=map_expr(rule.value, fn), args=tuple(map_expr(a, fn) for a in rule.args))
    if isinstance(rule, Par):
        return replace(rule, rules=tuple(map_rule_exprs(r, fn) for r in rule.rules))
    if isinstance(rule, Cond):
        return replace(rule, guard=map_expr(rule.guard, fn), then_rule=map_rule_exprs(rule.then_rule, fn),
                       else_rule=None if rule.else_rule is None else map_rule_exprs(rule.else_rule, fn))
    if isinstance(rule, Switch):
        return replace(rule, arms=tuple(replace(a, rule=map_rule_exprs(a.rule, fn)) for a in rule.arms),
                       default=None if rule.default is None else map_rule_exprs(rule.default, fn))
    return rule
