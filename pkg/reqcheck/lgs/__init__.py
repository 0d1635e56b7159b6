"""
The landing gear system case study.

The model ships as `models/lgs.req`; the erroneous variant is the same model
with `open_door` no longer reopening a closing door.
"""

from __future__ import annotations

import json
import logging
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

from reqcheck.config import VerifyConfig
from reqcheck.core.ast import Model, Symbol
from reqcheck.core.state import PlantState
from reqcheck.frontend.elaborate import load_model
from reqcheck.transforms import inject_error
from reqcheck.verifier.engine import enumerate_initial_states

logger = logging.getLogger(__name__)

MODELS_DIR = Path(__file__).resolve().parents[2] / "models"
MODEL_PATH = MODELS_DIR / "lgs.req"
GOLDEN_PATH = MODELS_DIR / "lgs.golden.json"

MOVING_GEAR = (Symbol("extending_state"), Symbol("retracting_state"))
RESTING_GEAR = (Symbol("extended_position"), Symbol("retracted_position"))


class LgsVariant(str, Enum):
    CORRECT = "correct"
    ERRONEOUS = "erroneous"


@lru_cache(maxsize=None)
def _base_model(path: Path) -> Model:
    return load_model(path)


def build_model(variant: LgsVariant = LgsVariant.CORRECT, path: Optional[Path] = None) -> Model:
    """Load the elaborated landing gear model, with the injected error when asked."""
    model = _base_model(Path(path or MODEL_PATH))
    if variant is LgsVariant.ERRONEOUS:
        model = inject_error(model)
    logger.debug(f"Built {variant.value} landing gear model")
    return model


def golden_verdicts(variant: LgsVariant = LgsVariant.CORRECT) -> Dict[str, Dict[str, Any]]:
    """Expected per-requirement results for one variant."""
    data = json.loads(GOLDEN_PATH.read_text(encoding="utf-8"))
    return data["variants"][variant.value]


def lgs_invariant_holds(state: PlantState) -> bool:
    """Moving gear needs an open door; a closed door needs resting gear."""
    door, gear = state["door_status"], state["gear_status"]
    if gear in MOVING_GEAR and door != Symbol("open_position"):
        return False
    if door == Symbol("closed_position") and gear not in RESTING_GEAR:
        return False
    return True


def valid_initial_states(model: Model, config: Optional[VerifyConfig] = None) -> List[PlantState]:
    return [s for s in enumerate_initial_states(model, config) if lgs_invariant_holds(s)]


__all__ = [
    "GOLDEN_PATH", "LgsVariant", "MODEL_PATH", "build_model", "golden_verdicts",
    "lgs_invariant_holds", "valid_initial_states",
]
