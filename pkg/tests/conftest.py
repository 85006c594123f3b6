from pathlib import Path

import pytest

from erc.config import Settings
from erc.core.budget import EvalBudget
from erc.corpus.functions import F_SIGNATURE
from erc.lang import load_program, prepare

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture
def small_budget() -> EvalBudget:
    return EvalBudget(max_steps=200_000, min_precision=-256)


@pytest.fixture
def settings(tmp_path) -> Settings:
    return Settings(corpus_dir=str(CORPUS_DIR), output_dir=str(tmp_path / "out"), samples=200)


@pytest.fixture
def load_corpus():
    """Load a corpus program, declaring ``f`` for the root finders."""

    def load(name: str, bound: tuple = ()):
        return load_program(CORPUS_DIR / name, {fn: F_SIGNATURE for fn in bound})

    return load


@pytest.fixture
def compile_source():
    def compile_(source: str, externals=None):
        return prepare(source, "test.erc", externals)

    return compile_


ENV_VARS = (
    "ERC_BUDGET_STEPS",
    "ERC_MIN_PRECISION",
    "ERC_POLICY",
    "ERC_SEED",
    "ERC_OUTPUT_DIR",
    "ERC_SAMPLES",
    "ERC_CORPUS_DIR",
    "ERC_LOG_LEVEL",
)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """No ERC_* variables and no .env in the working directory."""
    monkeypatch.chdir(tmp_path)
    for name in ENV_VARS:
        # registered first so values loaded from .env files are undone too
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
