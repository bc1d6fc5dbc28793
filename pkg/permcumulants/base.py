"""Exceptions and random streams shared by every module."""
from collections.abc import Iterable
from fractions import Fraction

import numpy as np


class PermCumulantsError(Exception):
    """Base class for every error raised by permcumulants."""


class ParameterError(PermCumulantsError, ValueError):
    """A numeric parameter (theta, N, x, beta, ...) is out of its domain."""


class CapacityError(PermCumulantsError):
    """A desk-scale guard was exceeded (enumeration size, partition count, ...)."""


class StructureError(PermCumulantsError, ValueError):
    """A combinatorial object does not satisfy its invariants."""


class MissingMomentError(PermCumulantsError, KeyError):
    """A moment functional has no value for a requested subset."""

    def __init__(self, subset: Iterable[int]):
        self.subset = tuple(sorted(subset))
        super().__init__(f"no moment given for subset {list(self.subset)}")

    def __str__(self) -> str:
        return str(self.args[0])


class ZeroMomentError(PermCumulantsError, ZeroDivisionError):
    """A moment needed as a divisor is zero."""

    def __init__(self, subset: Iterable[int]):
        self.subset = tuple(sorted(subset))
        super().__init__(f"moment of subset {list(self.subset)} is zero")


class PoleError(PermCumulantsError, ZeroDivisionError):
    """A rational function was evaluated at a root of its denominator."""

    def __init__(self, point: Fraction):
        self.point = point
        super().__init__(f"pole at N = {point}")


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return the random stream for ``key`` derived from ``seed``.

    Streams with different keys are independent and each is reproducible on
    its own, so chunks of work can be handed to any worker in any order.

    Args:
        seed: The user-facing seed.
        key: Non-negative integers naming the substream (chunk index, ...).

    Returns:
        A numpy Generator backed by the counter-based Philox bit generator.
    """
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(sequence))


# Keys at or above this value never collide with chunk indices.
AUXILIARY_STREAM_KEY = 2**32
