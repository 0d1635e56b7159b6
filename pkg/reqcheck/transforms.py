"""Model transformations applied before verification."""

import logging
from dataclasses import replace
from typing import Tuple

from reqcheck.core.ast import Case, Model, Statement
from reqcheck.core.visit import iter_statements, map_body
from reqcheck.errors import TransformError

logger = logging.getLogger(__name__)


def parse_arm_spec(spec: str) -> Tuple[str, str]:
    """Split a `routine:when` argument."""
    routine, sep, when = spec.partition(":")
    if not sep or not routine or not when:
        raise TransformError(f"expected ROUTINE:WHEN, got {spec!r}")
    return routine, when


def drop_case_arm(model: Model, routine: str, when: str) -> Model:
    """
    Remove every `when <when>` arm from the case statements of one routine.

    Raises:
        TransformError: The routine does not exist or has no such arm.
    """
    target = model.routine(routine)
    if target is None:
        raise TransformError(f"no routine named '{routine}'")
    if not any(isinstance(s, Case) and any(a.value == when for a in s.arms) for s in iter_statements(target.body)):
        raise TransformError(f"routine '{routine}' has no case arm 'when {when}'")

    def drop(stmt: Statement) -> Statement:
        if isinstance(stmt, Case):
            return replace(stmt, arms=tuple(a for a in stmt.arms if a.value != when))
        return stmt

    logger.info(f"Dropping case arm '{when}' from {routine}")
    return model.replace_routine(replace(target, body=map_body(target.body, drop)))


def inject_error(model: Model) -> Model:
    """The erroneous landing gear model: `open_door` no longer cancels a closing door."""
    return drop_case_arm(model, "open_door", "closing_state")
