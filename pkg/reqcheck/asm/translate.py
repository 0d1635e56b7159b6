"""
Translation of basic ASM rules into sequential statements.

A parallel block is translated by first computing every right-hand side into
an `<location>_intermediate` local, against the pre-step state, and only then
committing the locals to their locations. Conditionals and switches inside a
parallel block are distributed over its branches first, so that each branch
ends in a flat update set.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from reqcheck.asm.rules import (
    AsmRule, Cond, NamedRule, Par, RuleRef, Skip, Switch, Update, rule_references,
)
from reqcheck.core.ast import (
    Assign, Call, Case, CaseArm, Domain, If, LocalAssign, LocalDecl, LocalRef,
    Model, Routine, RoutineRole, Sequence as Seq, Statement,
)
from reqcheck.core.visit import flatten
from reqcheck.errors import ConflictingUpdateError, TranslationError, UnsupportedLocationError

logger = logging.getLogger(__name__)

INTERMEDIATE_SUFFIX = "_intermediate"


class _Names:
    """Hands out local names unique within one routine."""

    def __init__(self, reserved: Set[str]):
        self.taken = set(reserved)

    def fresh(self, location: str) -> str:
        base = f"{location}{INTERMEDIATE_SUFFIX}"
        name, n = base, 2
        while name in self.taken:
            name, n = f"{base}_{n}", n + 1
        self.taken.add(name)
        return name


class _Translator:
    def __init__(self, model: Model, rules: Mapping[str, NamedRule]):
        self.model = model
        self.rules = rules
        self.names = _Names({a.name for a in model.attributes})

    def statement(self, rule: AsmRule) -> Statement:
        if isinstance(rule, Update):
            self._check_location(rule)
            return Assign(rule.location, rule.value, span=rule.span)
        if isinstance(rule, RuleRef):
            if rule.name not in self.rules:
                raise TranslationError(f"reference to undeclared rule '{rule.name}'")
            return Call(rule.name, span=rule.span)
        if isinstance(rule, Skip):
            return Seq((), span=rule.span)
        if isinstance(rule, Cond):
            else_body = self.body(rule.else_rule) if rule.else_rule is not None else ()
            return If(((rule.guard, self.body(rule.then_rule)),), else_body, span=rule.span)
        if isinstance(rule, Switch):
            arms = tuple(CaseArm(a.value, self.body(a.rule), span=a.span) for a in rule.arms)
            default = self.body(rule.default) if rule.default is not None else None
            return Case(rule.scrutinee, arms, default, span=rule.span)
        if isinstance(rule, Par):
            return self.parallel(self._flat(rule, ()), rule)
        raise TranslationError(f"unsupported rule {type(rule).__name__}")

    def body(self, rule: AsmRule) -> Tuple[Statement, ...]:
        stmt = self.statement(rule)
        return stmt.body if isinstance(stmt, Seq) else (stmt,)

    def _check_location(self, update: Update):
        if update.args:
            raise UnsupportedLocationError(
                f"location '{update.location}' has {len(update.args)} arguments; only nullary locations are supported")

    def _flat(self, rule: AsmRule, expanding: Tuple[str, ...]) -> List[AsmRule]:
        """Members of a parallel block with nested blocks, skips and rule references inlined."""
        if isinstance(rule, Par):
            return [member for sub in rule.rules for member in self._flat(sub, expanding)]
        if isinstance(rule, Skip):
            return []
        if isinstance(rule, RuleRef):
            target = self.rules.get(rule.name)
            if target is None:
                raise TranslationError(f"reference to undeclared rule '{rule.name}'")
            if rule.name in expanding:
                raise TranslationError(f"rule '{rule.name}' refers to itself")
            return self._flat(target.body, expanding + (rule.name,))
        return [rule]

    def parallel(self, members: List[AsmRule], origin: AsmRule) -> Statement:
        for index, member in enumerate(members):
            rest = members[:index] + members[index + 1:]
            if isinstance(member, Cond):
                then_body = self._branch(rest, member.then_rule)
                else_body = self._branch(rest, member.else_rule)
                return If(((member.guard, then_body),), else_body, span=member.span)
            if isinstance(member, Switch):
                arms = tuple(CaseArm(a.value, self._branch(rest, a.rule), span=a.span) for a in member.arms)
                # unmatched scrutinee: the switch stutters, the rest of the block still fires
                return Case(member.scrutinee, arms, self._branch(rest, member.default), span=member.span)
        return self._update_set(members, origin)

    def _branch(self, rest: List[AsmRule], rule: Optional[AsmRule]) -> Tuple[Statement, ...]:
        members = rest + (self._flat(rule, ()) if rule is not None else [])
        stmt = self.parallel(members, rule or Skip())
        return stmt.body if isinstance(stmt, Seq) else (stmt,)

    def _update_set(self, members: Sequence[AsmRule], origin: AsmRule) -> Statement:
        updates: Dict[str, Update] = {}
        for update in members:
            if not isinstance(update, Update):
                raise TranslationError(f"unexpected {type(update).__name__} in a parallel block")
            self._check_location(update)
            previous = updates.get(update.location)
            if previous is not None:
                if previous.value != update.value:
                    raise ConflictingUpdateError(
                        f"location '{update.location}' is updated twice in one parallel block")
                continue
            updates[update.location] = update
        if not updates:
            return Seq((), span=origin.span)
        if len(updates) == 1:
            (update,) = updates.values()
            return Assign(update.location, update.value, span=update.span)
        decls: List[Statement] = []
        computes: List[Statement] = []
        commits: List[Statement] = []
        for location, update in updates.items():
            local = self.names.fresh(location)
            decls.append(LocalDecl(local, self._domain(location), span=update.span))
            computes.append(LocalAssign(local, update.value, span=update.span))
            commits.append(Assign(location, LocalRef(local), span=update.span))
        return Seq(tuple(decls + computes + commits), span=origin.span)

    def _domain(self, location: str) -> Domain:
        attr = self.model.attribute(location)
        if attr is None:
            raise TranslationError(f"update of undeclared location '{location}'")
        return attr.domain


def translate_rule(rule: AsmRule, model: Model, rules: Optional[Mapping[str, NamedRule]] = None) -> Statement:
    """
    Translate one rule into a statement with the same one-step effect.

    Args:
        rule (AsmRule): The rule.
        model (Model): Supplies the domains of the updated locations.
        rules (Mapping[str, NamedRule], optional): Named rules that references
            may point to.

    Raises:
        ConflictingUpdateError: A parallel block updates one location twice
            with different right-hand sides.
        UnsupportedLocationError: An update targets a location with arguments.
        TranslationError: A reference to an undeclared rule.
    """
    return _Translator(model, rules or {}).statement(rule)


def _check_references(rules: Mapping[str, NamedRule]):
    graph = {name: rule_references(r.body) for name, r in rules.items()}
    for name, refs in graph.items():
        for ref in refs:
            if ref not in graph:
                raise TranslationError(f"rule '{name}' refers to undeclared rule '{ref}'")
    done: Set[str] = set()

    def visit(name: str, path: Tuple[str, ...]):
        if name in path:
            raise TranslationError(f"cyclic rule references: {' -> '.join(path + (name,))}")
        if name in done:
            return
        for ref in graph[name]:
            visit(ref, path + (name,))
        done.add(name)

    for name in graph:
        visit(name, ())


def translate_machine(rules: Sequence[NamedRule], main_rule: Optional[str], model: Model) -> List[Routine]:
    """
    Translate a set of named rules into one step routine each.

    Args:
        rules (Sequence[NamedRule]): The machine's rules.
        main_rule (str, optional): The rule the machine runs each step; it
            becomes the model's step routine.
        model (Model): Supplies attribute domains.

    Returns:
        List[Routine]: One routine per rule, in rule order.

    Raises:
        TranslationError: Duplicate or dangling rule names, cyclic references,
            or any error of `translate_rule`.
    """
    index: Dict[str, NamedRule] = {}
    for rule in rules:
        if rule.name in index:
            raise TranslationError(f"rule '{rule.name}' is declared twice")
        index[rule.name] = rule
    if main_rule is not None and main_rule not in index:
        raise TranslationError(f"main rule '{main_rule}' is not declared")
    _check_references(index)
    routines = []
    for rule in rules:
        body = flatten(_Translator(model, index).body(rule.body))
        routines.append(Routine(rule.name, body, RoutineRole.STEP, span=rule.span, annotation=rule.annotation))
    logger.debug(f"Translated {len(routines)} rules (main: {main_rule})")
    return routines
