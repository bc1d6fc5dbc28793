"""Utilities for testing."""
import json
import traceback
from functools import lru_cache
from typing import Any
from unittest import TestCase

from permcumulants import settings
from permcumulants.montecarlo import RunConfig


@lru_cache(1)
def get_test_settings() -> settings.Settings:
    """Get a Settings object that ignores .env files and environment variables."""

    return settings.Settings(
        # To stop any local .env files influencing the test
        # The mypy ignore can be removed once we upgrade to pydantic 2.
        _env_file=None,  # type: ignore[call-arg]
    )


def small_run(n: int, theta: float = 1.0, **overrides: Any) -> RunConfig:
    """A Monte-Carlo configuration small enough for unit tests."""
    values: dict[str, Any] = {
        "samples": 2000,
        "seed": 7,
        "chunk_size": 500,
        "bootstrap_resamples": 50,
    }
    values.update(overrides)
    return RunConfig.from_settings(get_test_settings(), n=n, theta=theta, **values)


class PermCumulantsTestCase(TestCase):
    """Parent class for all TestCases in permcumulants."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        """Initialize an instance of PermCumulantsTestCase."""
        self.maxDiff = None  # pylint: disable=invalid-name
        super().__init__(*args, **kwargs)

    def setUp(self) -> None:
        settings.get_settings.cache_clear()

    def assertReturnCode(  # pylint: disable=invalid-name
        self, result: Any, expected_code: int
    ) -> None:
        """Give details for a CLI result and raise if it's not as expected."""
        if result.exit_code != expected_code:
            print(result.stdout)
            print(result.stderr)
            if result.exception is not None and not isinstance(result.exception, SystemExit):
                print("".join(traceback.format_exception(result.exception)))
            self.assertEqual(expected_code, result.exit_code)

    def assertSuccess(self, result: Any) -> None:  # pylint: disable=invalid-name
        """Give details for a CLI result and raise if the result isn't good."""
        self.assertReturnCode(result, 0)

    def assertFailure(self, result: Any) -> None:  # pylint: disable=invalid-name
        """Give details for a CLI result and raise if the result isn't bad."""
        self.assertReturnCode(result, 1)

    def assertUsageError(self, result: Any) -> None:  # pylint: disable=invalid-name
        """Give details for a CLI result and raise unless it is a usage error."""
        self.assertReturnCode(result, 2)

    def assertDocument(self, result: Any, command: str) -> dict:  # pylint: disable=invalid-name
        """Parse the JSON document a command wrote and check its header."""
        document = json.loads(result.stdout)
        self.assertEqual("1.0", document["schema_version"])
        self.assertEqual(command, document["command"])
        return document
