import pytest

from erc.config import Settings, load_settings
from erc.core.budget import DEFAULT_MAX_STEPS

pytestmark = pytest.mark.usefixtures("clean_env")


def test_defaults():
    settings = load_settings(env_path="missing.env")
    assert settings.max_steps == DEFAULT_MAX_STEPS
    assert settings.policy().mode == "left"
    assert settings.validate() == []
    assert not settings.has_errors


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ERC_POLICY", " Random ")
    monkeypatch.setenv("ERC_SEED", "9")
    monkeypatch.setenv("ERC_BUDGET_STEPS", "5000")
    settings = load_settings(env_path="missing.env")
    assert str(settings.policy()) == "random(seed=9)"
    assert settings.budget().max_steps == 5000
    assert settings.validate() == []


def test_env_file(tmp_path):
    env_file = tmp_path / "erc.env"
    env_file.write_text("ERC_POLICY=right\nERC_SAMPLES=64\n", encoding="utf-8")
    settings = load_settings(env_path=str(env_file))
    assert settings.policy_key == "right"
    assert settings.samples == 64


def test_bad_integer(monkeypatch):
    monkeypatch.setenv("ERC_MIN_PRECISION", "fine")
    with pytest.raises(ValueError, match="ERC_MIN_PRECISION must be an integer"):
        load_settings(env_path="missing.env")


def test_validation_issues(tmp_path):
    settings = Settings(
        max_steps=0,
        min_precision=4,
        policy_key="random",
        samples=0,
        corpus_dir=str(tmp_path),
        log_level="LOUD",
    )
    issues = settings.validate()
    errors = [i for i in issues if i.startswith("error:")]
    warnings = [i for i in issues if i.startswith("warning:")]
    assert len(errors) == 3
    assert any("without ERC_SEED" in w for w in warnings)
    assert any("no corpus.json" in w for w in warnings)
    assert any("ERC_LOG_LEVEL" in w for w in warnings)
    assert settings.has_errors


def test_unknown_policy():
    issues = Settings(policy_key="middle").validate()
    assert issues and "unknown ERC_POLICY" in issues[0]
