"""Tests for the base module."""
from fractions import Fraction

import numpy as np

from permcumulants.base import (
    AUXILIARY_STREAM_KEY,
    MissingMomentError,
    ParameterError,
    PermCumulantsError,
    PoleError,
    StructureError,
    substream,
)
from tests.utils import PermCumulantsTestCase


class SubstreamTests(PermCumulantsTestCase):
    """Tests for the substream function."""

    def test_same_key_same_draws(self) -> None:
        """A stream is reproducible from its seed and key alone."""
        first = substream(42, 3).random(5)
        second = substream(42, 3).random(5)
        np.testing.assert_array_equal(first, second)

    def test_different_keys_differ(self) -> None:
        """Chunks and auxiliary streams do not share draws."""
        chunk = substream(42, 0).random(5)
        other_chunk = substream(42, 1).random(5)
        auxiliary = substream(42, AUXILIARY_STREAM_KEY).random(5)
        self.assertFalse(np.array_equal(chunk, other_chunk))
        self.assertFalse(np.array_equal(chunk, auxiliary))

    def test_different_seeds_differ(self) -> None:
        self.assertFalse(np.array_equal(substream(1, 0).random(5), substream(2, 0).random(5)))

    def test_negative_seed(self) -> None:
        with self.assertRaises(ParameterError):
            substream(-1, 0)


class ErrorTests(PermCumulantsTestCase):
    """Tests for the exception hierarchy."""

    def test_hierarchy(self) -> None:
        """Library errors can be caught as one family or as builtin types."""
        self.assertTrue(issubclass(ParameterError, PermCumulantsError))
        self.assertTrue(issubclass(ParameterError, ValueError))
        self.assertTrue(issubclass(StructureError, ValueError))
        self.assertTrue(issubclass(PoleError, ZeroDivisionError))

    def test_messages(self) -> None:
        self.assertEqual("no moment given for subset [1, 3]", str(MissingMomentError({3, 1})))
        self.assertEqual(Fraction(1, 2), PoleError(Fraction(1, 2)).point)
