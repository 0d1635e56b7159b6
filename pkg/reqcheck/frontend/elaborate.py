"""From a parsed model to a verifiable one."""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path
from typing import Union

from reqcheck.asm.translate import translate_machine
from reqcheck.core.ast import Model
from reqcheck.frontend.parser import parse_model
from reqcheck.patterns.synth import synth

logger = logging.getLogger(__name__)


def _file_order(routine):
    span = routine.span
    return (0, span.line, span.column) if span is not None else (1, 0, 0)


def elaborate(model: Model) -> Model:
    """
    Translate rule declarations and synthesize pattern declarations into routines.

    Patterns are synthesized in declaration order, each against the routines
    available so far. The resulting routines are kept in file order.
    """
    if not model.rules and not model.patterns:
        return model
    main_rule = model.step_name if any(r.name == model.step_name for r in model.rules) else None
    routines = list(model.routines) + translate_machine(model.rules, main_rule, model)
    current = model.with_routines(routines)
    for instance in model.patterns:
        routines.append(synth(instance, current))
        current = current.with_routines(routines)
    routines.sort(key=_file_order)
    logger.debug(f"Elaborated {model.name}: {len(model.rules)} rules, {len(model.patterns)} patterns")
    return replace(model, routines=tuple(routines), rules=(), patterns=())


def load_model(path: Union[str, Path]) -> Model:
    """Read, parse and elaborate a `.req` file."""
    path = Path(path)
    return elaborate(parse_model(path.read_text(encoding="utf-8"), str(path)))
