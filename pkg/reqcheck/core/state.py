"""Plant states and routine activation frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, Tuple

from reqcheck.core.ast import DURATION, Domain, Symbol, Value

StateKey = Tuple[Tuple[str, Value], ...]


@dataclass
class PlantState:
    """A total valuation of the model's attributes, `duration` included."""
    values: Dict[str, Value]

    def __getitem__(self, name: str) -> Value:
        return self.values[name]

    def __setitem__(self, name: str, value: Value) -> None:
        self.values[name] = value

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    @property
    def duration(self) -> int:
        return int(self.values.get(DURATION, 0))

    def snapshot(self) -> "PlantState":
        # values are immutable scalars, so copying the mapping is a deep copy
        return PlantState(dict(self.values))

    def key(self) -> StateKey:
        return tuple(self.values.items())

    @classmethod
    def from_key(cls, key: StateKey) -> "PlantState":
        return cls(dict(key))

    def as_dict(self) -> Dict[str, Any]:
        """JSON-friendly view: symbols become their names."""
        return {k: (v.name if isinstance(v, Symbol) else v) for k, v in self.values.items()}

    def describe(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.as_dict().items())


def snapshot(state: PlantState) -> PlantState:
    """Independent copy of `state`; later mutation of either leaves the other alone."""
    return state.snapshot()


@dataclass
class Frame:
    """One routine activation: the shared current state plus its entry snapshot."""
    routine: str
    current: PlantState
    entry_snapshot: PlantState
    locals: Dict[str, Value] = field(default_factory=dict)
    local_domains: Dict[str, Domain] = field(default_factory=dict)

    @classmethod
    def enter(cls, routine: str, state: PlantState) -> "Frame":
        return cls(routine=routine, current=state, entry_snapshot=state.snapshot())
