"""Utils for reading settings from environment variables.

See module pydantic for enforcing type hints at runtime.
See module functools.lru_cache to save time and memory
in case of repeated calls.

Classes:

    Settings

Functions:

    get_settings() -> Settings
    check_count, check_seed, check_positive, check_tv_threshold (validators shared with RunConfig)

"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

# pylint: disable=no-self-argument
from pydantic import BaseSettings, validator
from pydantic.fields import ModelField


# Shared by Settings and montecarlo.RunConfig via validator(..., allow_reuse=True).
def check_count(cls: Any, value: int, field: ModelField) -> int:
    """Counts must be at least one."""
    if value < 1:
        raise ValueError(f"{field.name} must be at least 1")
    return value


def check_seed(cls: Any, seed: int) -> int:
    """Seeds are non-negative."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return seed


def check_positive(cls: Any, value: float, field: ModelField) -> float:
    """A finite, strictly positive real."""
    if not value > 0 or not math.isfinite(value):
        raise ValueError(f"{field.name} must be positive")
    return value


def check_tv_threshold(cls: Any, threshold: float) -> float:
    """A total variation threshold lies strictly between 0 and 1."""
    if not 0 < threshold < 1:
        raise ValueError("tv_threshold must lie in (0, 1)")
    return threshold


class Settings(BaseSettings):
    """Defaults for Monte-Carlo runs, read from ``PERMCUMULANTS_*`` variables.

    Attributes:
        seed (int) :
            The seed every random stream is derived from.

        samples (int) :
            The number of sampled permutations per run.

        workers (int) :
            The number of worker processes; results do not depend on it.

        chunk_size (int) :
            The number of permutations drawn from one random substream.

        bootstrap_resamples (int) :
            The number of bootstrap resamples behind every standard error.

        se_multiple (float) :
            How many standard errors a checked estimate may stray from its target.

        tv_threshold (float) :
            The largest total variation distance a Poisson comparison accepts.
    """

    seed: int = 0
    samples: int = 10000
    workers: int = 1
    chunk_size: int = 1000
    bootstrap_resamples: int = 200
    se_multiple: float = 4.0
    tv_threshold: float = 0.01

    check_counts = validator(
        "samples", "workers", "chunk_size", "bootstrap_resamples", allow_reuse=True
    )(check_count)
    check_seeds = validator("seed", allow_reuse=True)(check_seed)
    check_se_multiples = validator("se_multiple", allow_reuse=True)(check_positive)
    check_tv_thresholds = validator("tv_threshold", allow_reuse=True)(check_tv_threshold)

    @dataclass
    class Config:
        """Meta-settings for the Settings class."""

        env_prefix = "PERMCUMULANTS_"
        env_file = ".env"
        env_file_encoding = "utf-8"


@lru_cache(1)
def get_settings() -> Settings:
    """Return the same Settings object every call."""
    return Settings()
