"""
The landing gear plant written directly in Python.

A hand encoding of the step rules and the timing assumptions, sharing nothing
with the `.req` toolchain. Tests compare it against the interpreted model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from reqcheck.lgs import LgsVariant

UP, DOWN = "up_position", "down_position"
CLOSED, OPENING, OPEN, CLOSING = "closed_position", "opening_state", "open_position", "closing_state"
EXTENDED, EXTENDING, RETRACTED, RETRACTING = (
    "extended_position", "extending_state", "retracted_position", "retracting_state")

# time units charged when a step reaches the position
ARRIVAL_TIMES: Dict[str, int] = {CLOSED: 8, OPEN: 12, RETRACTED: 10, EXTENDED: 5}

_OPEN_DOOR = {CLOSED: OPENING, OPENING: OPEN, CLOSING: OPENING}
_CLOSE_DOOR = {OPEN: CLOSING, CLOSING: CLOSED, OPENING: CLOSING}
_EXTEND_GEAR = {RETRACTED: EXTENDING, EXTENDING: EXTENDED, RETRACTING: EXTENDING}
_RETRACT_GEAR = {EXTENDED: RETRACTING, RETRACTING: RETRACTED, EXTENDING: RETRACTING}


def _open_door(door: str, variant: LgsVariant) -> str:
    if variant is LgsVariant.ERRONEOUS and door == CLOSING:
        return door
    return _OPEN_DOOR.get(door, door)


def step(handle: str, door: str, gear: str, variant: LgsVariant = LgsVariant.CORRECT) -> Tuple[str, str]:
    """One plant step; returns the new (door, gear)."""
    if handle == UP:
        if gear == RETRACTED:
            return _CLOSE_DOOR.get(door, door), gear
        if door == OPEN:
            return door, _RETRACT_GEAR[gear]
        if door == CLOSING:
            return OPENING, gear
        return _open_door(door, variant), gear
    if gear == EXTENDED:
        return _CLOSE_DOOR.get(door, door), gear
    if door == OPEN:
        return door, _EXTEND_GEAR[gear]
    return _open_door(door, variant), gear


def normal_mode(door: str, gear: str) -> bool:
    if gear in (EXTENDING, RETRACTING) and door != OPEN:
        return False
    return not (door == CLOSED and gear not in (EXTENDED, RETRACTED))


def elapsed(before: Tuple[str, str], after: Tuple[str, str]) -> int:
    return sum(ARRIVAL_TIMES.get(new, 0) for old, new in zip(before, after) if old != new)


@dataclass(frozen=True)
class TimedRun:
    kind: str
    door: str
    gear: str
    duration: int


def run_timed_obligation(handle: str, door: str, gear: str, required_handle: str, target_gear: str,
                         limit: int, variant: LgsVariant = LgsVariant.CORRECT,
                         unroll_bound: int = 64) -> TimedRun:
    """
    Step with the handle held until the gear rests at `target_gear` behind a
    closed door, or more than `limit` time units have passed.

    Kinds follow the verifier's outcome names: the run is `assume_violated`
    when the handle is wrong or the plant leaves normal mode, `diverged` when
    a state repeats, `bound_exceeded` after `unroll_bound` steps, and
    `assert_failed` when the target is missed or late.
    """
    duration = 0

    def advance() -> bool:
        nonlocal door, gear, duration
        if handle != required_handle or not normal_mode(door, gear):
            return False
        after = step(handle, door, gear, variant)
        duration += elapsed((door, gear), after)
        door, gear = after
        return True

    def result(kind: str) -> TimedRun:
        return TimedRun(kind, door, gear, duration)

    if not advance():
        return result("assume_violated")
    executions, seen = 1, set()
    while True:
        if (door, gear, duration) in seen:
            return result("diverged")
        seen.add((door, gear, duration))
        reached = gear == target_gear and door == CLOSED
        if reached or duration > limit:
            break
        if executions >= unroll_bound:
            return result("bound_exceeded")
        if not advance():
            return result("assume_violated")
        executions += 1
    return result("completed" if reached and duration <= limit else "assert_failed")
