"""Configuration for the verifier, from defaults, YAML and environment variables"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "reqcheck.yaml"


@dataclass(frozen=True)
class VerifyConfig:
    """Verification settings"""
    # Loop unrolling: executions of a loop's routine calls, `from` part included
    unroll_bound: int = 64

    # Ghost time; passing the cap aborts verification
    duration_cap: int = 10_000

    # Report a repeated plant state inside one loop as divergence
    detect_cycles: bool = True

    # Largest product of attribute domains we agree to enumerate
    max_initial_states: int = 100_000

    # Threads checking initial states of one requirement
    workers: int = 1

    def __post_init__(self):
        if self.unroll_bound < 1:
            raise ValueError(f"unroll_bound must be at least 1, got {self.unroll_bound}")
        if self.duration_cap < 0:
            raise ValueError(f"duration_cap must be nonnegative, got {self.duration_cap}")
        if self.max_initial_states < 1:
            raise ValueError(f"max_initial_states must be at least 1, got {self.max_initial_states}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")


_ENV_VARS = {
    "unroll_bound": "REQCHECK_UNROLL",
    "duration_cap": "REQCHECK_DURATION_CAP",
    "detect_cycles": "REQCHECK_DETECT_CYCLES",
    "max_initial_states": "REQCHECK_MAX_STATES",
    "workers": "REQCHECK_WORKERS",
}


def _env_overrides() -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    for name, var in _ENV_VARS.items():
        raw = os.getenv(var)
        if raw is None or raw == "":
            continue
        if name == "detect_cycles":
            overrides[name] = raw.lower() == "true"
        else:
            try:
                overrides[name] = int(raw)
            except ValueError:
                raise ValueError(f"{var} must be an integer, got {raw!r}") from None
    return overrides


def get_verify_config(base: Optional[VerifyConfig] = None) -> VerifyConfig:
    """Get verifier configuration: `base` (defaults when omitted) overridden by environment variables"""
    return replace(base or VerifyConfig(), **_env_overrides())


def load_verify_config(path: Union[str, Path, None] = None) -> VerifyConfig:
    """
    Load verifier configuration from a YAML file, then apply environment overrides.

    Args:
        path (str | Path, optional): A YAML file with a `reqcheck: verifier:`
            block. Defaults to the shipped `config/reqcheck.yaml`; a missing
            default file means built-in defaults.

    Returns:
        VerifyConfig: The merged configuration.
    """
    config_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if path is None and not config_path.exists():
        return get_verify_config()
    data = yaml.safe_load(config_path.read_text()) or {}
    section = (data.get("reqcheck") or {}).get("verifier") or {}
    known = {f.name for f in fields(VerifyConfig)}
    unknown = set(section) - known
    if unknown:
        raise ValueError(f"unknown verifier settings in {config_path}: {', '.join(sorted(unknown))}")
    return get_verify_config(VerifyConfig(**section))


# Example configurations for different environments

DEFAULT_CONFIG = VerifyConfig()

CI_CONFIG = VerifyConfig(
    unroll_bound=64,
    duration_cap=10_000,
    detect_cycles=True,
    max_initial_states=10_000,  # Fail fast on models that would not finish in CI
    workers=1,
)
