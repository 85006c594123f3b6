"""Configuration management for erc-toolkit."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from erc.core.budget import DEFAULT_MAX_STEPS, DEFAULT_MIN_PRECISION, EvalBudget
from erc.core.choice import ChoicePolicy

DEFAULT_CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass
class Settings:
    """Toolkit settings loaded from environment variables."""

    # Evaluation budget
    max_steps: int = DEFAULT_MAX_STEPS
    min_precision: int = DEFAULT_MIN_PRECISION

    # Choice policy
    policy_key: str = "left"
    seed: int = 0
    seed_set: bool = False

    # Verification
    output_dir: str = "erc-out"
    samples: int = 10_000

    # Corpus
    corpus_dir: str = str(DEFAULT_CORPUS_DIR)

    log_level: str = "WARNING"

    def budget(self) -> EvalBudget:
        return EvalBudget(max_steps=self.max_steps, min_precision=self.min_precision)

    def policy(self) -> ChoicePolicy:
        return ChoicePolicy.from_key(self.policy_key, self.seed)

    def validate(self) -> list[str]:
        """Validate configuration and return a list of "error:"/"warning:" issues."""
        issues: list[str] = []

        if self.max_steps <= 0:
            issues.append(f"error: ERC_BUDGET_STEPS must be positive, got {self.max_steps}")

        if self.min_precision >= 0:
            issues.append(f"error: ERC_MIN_PRECISION must be negative, got {self.min_precision}")

        if self.policy_key not in ChoicePolicy.MODES:
            issues.append(
                f"error: unknown ERC_POLICY {self.policy_key!r}; expected one of {', '.join(ChoicePolicy.MODES)}"
            )
        elif self.policy_key == "random" and not self.seed_set:
            issues.append("warning: random policy without ERC_SEED; using seed 0")

        if self.samples <= 0:
            issues.append(f"error: ERC_SAMPLES must be positive, got {self.samples}")

        if not (Path(self.corpus_dir) / "corpus.json").is_file():
            issues.append(f"warning: no corpus.json in {self.corpus_dir}; 'erc corpus' will fail")

        if self.log_level.upper() not in LOG_LEVELS:
            issues.append(f"warning: unknown ERC_LOG_LEVEL {self.log_level!r}; using WARNING")

        return issues

    @property
    def has_errors(self) -> bool:
        return any(issue.startswith("error:") for issue in self.validate())


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def load_settings(env_path: Optional[str] = None) -> Settings:
    """Load settings from .env file and environment variables.

    Args:
        env_path: Path to .env file. Defaults to .env in current directory.

    Returns:
        Configured Settings instance.

    Raises:
        ValueError: An integer setting does not parse.
    """
    if env_path:
        load_dotenv(env_path)
    else:
        load_dotenv()

    seed_raw = os.getenv("ERC_SEED")

    return Settings(
        max_steps=_int_env("ERC_BUDGET_STEPS", DEFAULT_MAX_STEPS),
        min_precision=_int_env("ERC_MIN_PRECISION", DEFAULT_MIN_PRECISION),
        policy_key=os.getenv("ERC_POLICY", "left").strip().lower(),
        seed=_int_env("ERC_SEED", 0),
        seed_set=bool(seed_raw and seed_raw.strip()),
        output_dir=os.getenv("ERC_OUTPUT_DIR", "erc-out"),
        samples=_int_env("ERC_SAMPLES", 10_000),
        corpus_dir=os.getenv("ERC_CORPUS_DIR", str(DEFAULT_CORPUS_DIR)),
        log_level=os.getenv("ERC_LOG_LEVEL", "WARNING").strip().upper(),
    )


def print_config_status(settings: Settings) -> None:
    """Print a configuration status report."""
    print("\nerc-toolkit configuration")
    print("=" * 45)

    print("\nEvaluation budget:")
    print(f"  Max steps:       {settings.max_steps:,}")
    print(f"  Min precision:   {settings.min_precision}")

    print("\nChoice policy:")
    print(f"  Policy:          {settings.policy_key}")
    print(f"  Seed:            {settings.seed}{'' if settings.seed_set else ' (default)'}")

    print("\nVerification:")
    print(f"  Output dir:      {settings.output_dir}")
    print(f"  Samples per VC:  {settings.samples:,}")

    print("\nCorpus:")
    print(f"  Directory:       {settings.corpus_dir}")
    print(f"  Log level:       {settings.log_level}")

    issues = settings.validate()
    if issues:
        print("\n" + "\n".join(issues))
    else:
        print("\nok: configuration is valid")
    print()
