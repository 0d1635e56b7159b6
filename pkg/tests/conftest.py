"""Pytest configuration and shared fixtures."""

import json
from pathlib import Path

import pytest

from reqcheck.config import VerifyConfig
from reqcheck.frontend import load_model, parse_model
from reqcheck.lgs import LgsVariant, build_model

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


TOY_SOURCE = """\
model toy

env attribute switch : {on, off}
attribute lamp : {lit, dark}
attribute level : 0 .. 3
ghost attribute duration : 0 .. 10000

-- one step of the lamp
routine main do
  if switch = on then
    lamp := lit
  else
    lamp := dark
  end
end

routine run_switched_on assumption do
  assume switch = on end
  main
end

routine lamp_lit_when_on requirement do
  run_switched_on
  assert lamp = lit end
end

routine lamp_always_lit requirement do
  main
  assert lamp = lit end
end
"""


@pytest.fixture(scope="session")
def lgs_path():
    return MODELS / "lgs.req"


@pytest.fixture(scope="session")
def gcd_path():
    return MODELS / "gcd.req"


@pytest.fixture(scope="session")
def lgs_model():
    """The elaborated, correct landing gear model."""
    return build_model(LgsVariant.CORRECT)


@pytest.fixture(scope="session")
def lgs_erroneous():
    return build_model(LgsVariant.ERRONEOUS)


@pytest.fixture(scope="session")
def lgs_parsed(lgs_path):
    """The landing gear model as parsed, rules not yet translated."""
    return parse_model(lgs_path.read_text(encoding="utf-8"), str(lgs_path))


@pytest.fixture(scope="session")
def gcd_model(gcd_path):
    return load_model(gcd_path)


@pytest.fixture
def toy_source():
    return TOY_SOURCE


@pytest.fixture
def toy_model():
    return parse_model(TOY_SOURCE, "toy.req")


@pytest.fixture
def test_config():
    """Verifier settings for tests."""
    return VerifyConfig(unroll_bound=64, duration_cap=10_000, detect_cycles=True,
                        max_initial_states=10_000, workers=1)


@pytest.fixture
def load_fixture():
    def _load(name):
        return json.loads((FIXTURES / name).read_text(encoding="utf-8"))
    return _load


@pytest.fixture(autouse=True)
def clean_reqcheck_env(monkeypatch):
    """Keep REQCHECK_* settings of the calling shell out of the tests."""
    for var in ("REQCHECK_UNROLL", "REQCHECK_DURATION_CAP", "REQCHECK_DETECT_CYCLES",
                "REQCHECK_MAX_STATES", "REQCHECK_WORKERS", "REQCHECK_LOG_LEVEL"):
        monkeypatch.delenv(var, raising=False)
