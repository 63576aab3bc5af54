import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
REPO_DIR = TESTS_DIR.parent
SAMPLES_DIR = REPO_DIR / "samples"
DATA_DIR = TESTS_DIR / "data"
GOLDEN_DIR = TESTS_DIR / "golden"

# Make the sibling helper modules (genmodels, oracles, dot_grammar)
# importable regardless of how pytest was launched.
sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture(scope="session")
def samples_dir() -> Path:
    return SAMPLES_DIR


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


def load_sample(name: str):
    from daqforge.parser import parse_model

    result = parse_model((SAMPLES_DIR / name).read_text(encoding="utf-8"))
    assert result.ok, [d.message for d in result.diagnostics]
    return result.model


@pytest.fixture(scope="session")
def adw_model():
    return load_sample("adw.daml")


@pytest.fixture(scope="session")
def odw_model():
    return load_sample("odw.daml")


@pytest.fixture(scope="session")
def quality_gate_model():
    return load_sample("quality_gate.daml")


@pytest.fixture(scope="session")
def event_log_model():
    return load_sample("event_log.daml")
