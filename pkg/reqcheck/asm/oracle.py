"""Direct ASM update-set semantics, used to check the translation one step at a time."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from reqcheck.asm.rules import AsmRule, Cond, NamedRule, Par, RuleRef, Skip, Switch, Update
from reqcheck.config import VerifyConfig
from reqcheck.core.ast import Model, Symbol, Value
from reqcheck.core.evaluator import eval_bool, eval_expr
from reqcheck.core.state import Frame, PlantState
from reqcheck.errors import ConflictingUpdateError, TranslationError, UnsupportedLocationError
from reqcheck.verifier.engine import Interpreter, enumerate_initial_states
from reqcheck.verifier.outcomes import Completed

logger = logging.getLogger(__name__)


def update_set(rule: AsmRule, frame: Frame, rules: Mapping[str, NamedRule]) -> Dict[str, Value]:
    """Locations and values a rule fires in the frame's state; all reads see that state."""
    if isinstance(rule, Update):
        if rule.args:
            raise UnsupportedLocationError(f"location '{rule.location}' has arguments")
        return {rule.location: eval_expr(rule.value, frame)}
    if isinstance(rule, Skip):
        return {}
    if isinstance(rule, RuleRef):
        target = rules.get(rule.name)
        if target is None:
            raise TranslationError(f"reference to undeclared rule '{rule.name}'")
        return update_set(target.body, frame, rules)
    if isinstance(rule, Cond):
        if eval_bool(rule.guard, frame):
            return update_set(rule.then_rule, frame, rules)
        return update_set(rule.else_rule, frame, rules) if rule.else_rule is not None else {}
    if isinstance(rule, Switch):
        value = frame.current[rule.scrutinee]
        for arm in rule.arms:
            if value == Symbol(arm.value):
                return update_set(arm.rule, frame, rules)
        return update_set(rule.default, frame, rules) if rule.default is not None else {}
    if isinstance(rule, Par):
        merged: Dict[str, Value] = {}
        for sub in rule.rules:
            for location, value in update_set(sub, frame, rules).items():
                if location in merged and merged[location] != value:
                    raise ConflictingUpdateError(
                        f"inconsistent update of '{location}': {merged[location]} and {value}")
                merged[location] = value
        return merged
    raise TranslationError(f"unsupported rule {type(rule).__name__}")


def apply_asm(rule: AsmRule, state: PlantState, rules: Optional[Mapping[str, NamedRule]] = None) -> PlantState:
    """One ASM step: compute the update set on `state`, then fire it on a copy."""
    updates = update_set(rule, Frame.enter("<asm>", state.snapshot()), rules or {})
    result = state.snapshot()
    for location, value in updates.items():
        result[location] = value
    return result


@dataclass(frozen=True)
class Mismatch:
    rule: str
    initial: PlantState
    expected: PlantState
    actual: Optional[PlantState]

    def __str__(self) -> str:
        actual = self.actual.describe() if self.actual is not None else "no final state"
        return (f"{self.rule} from [{self.initial.describe()}]: "
                f"expected [{self.expected.describe()}], got [{actual}]")


@dataclass(frozen=True)
class OracleReport:
    compared: int
    mismatches: List[Mismatch]

    @property
    def clean(self) -> bool:
        return not self.mismatches


def check_one_step(model: Model, rules: Sequence[NamedRule],
                   states: Optional[Iterable[PlantState]] = None,
                   config: Optional[VerifyConfig] = None) -> OracleReport:
    """
    Compare every translated rule against `apply_asm` from every state.

    Args:
        model (Model): The elaborated model holding the translated routines.
        rules (Sequence[NamedRule]): The rules as declared.
        states (Iterable[PlantState], optional): Defaults to all initial states
            of the model.

    Returns:
        OracleReport: Number of (rule, state) pairs compared and the mismatches.
    """
    config = config or VerifyConfig()
    state_list = list(states) if states is not None else enumerate_initial_states(model, config)
    index = {r.name: r for r in rules}
    interpreter = Interpreter(model, config, check_domains=False)
    mismatches: List[Mismatch] = []
    compared = 0
    for rule in rules:
        if model.routine(rule.name) is None:
            raise TranslationError(f"rule '{rule.name}' has no translated routine")
        for state in state_list:
            compared += 1
            expected = apply_asm(rule.body, state, index)
            outcome = interpreter.run(rule.name, state)
            actual = outcome.final if isinstance(outcome, Completed) else None
            if actual is None or actual.values != expected.values:
                mismatches.append(Mismatch(rule.name, state, expected, actual))
    logger.info(f"One-step oracle: {compared} comparisons, {len(mismatches)} mismatches")
    return OracleReport(compared, mismatches)
