"""Tests for the statistics module."""
import itertools
import math
from fractions import Fraction

import numpy as np

from permcumulants.base import CapacityError, ParameterError, StructureError, substream
from permcumulants.permutation import (
    Permutation,
    enumerate_ewens,
    ewens_sample_batch,
    exact_moments,
)
from permcumulants.statistics import (
    BivincularPattern,
    Constraint,
    DashedCounter,
    DashedPattern,
    Expression,
    LocalStatistic,
    adjacency_batch,
    adjacency_count,
    adjacency_statistics,
    bivincular_as_local,
    count_bivincular,
    count_dashed,
    count_local,
    dashed_as_local,
    dashed_mean,
    descent_count,
    exceedance_batch,
    exceedance_count,
    exceedance_moments,
    exceedance_statistic,
    f_batch,
    f_expectation,
    f_function,
    f_limit,
    gamma_batch,
    gamma_p,
    inversion_count,
    k_covariance,
    k_covariance_quadrature,
    parse_pattern,
    poisson_cycles,
    theoretical_limits,
    z_covariance,
)
from tests.utils import PermCumulantsTestCase

THETAS = ["1/2", "1", "2"]


def _random_permutations(n: int, count: int, seed: int) -> list[Permutation]:
    samples = ewens_sample_batch(n, 1.0, count, substream(seed, 0))
    return [Permutation.from_array(row) for row in samples]


def _random_pattern(rng: np.random.Generator, bivincular: bool) -> BivincularPattern:
    p = int(rng.integers(1, 5))
    tau = Permutation.from_array(rng.permutation(p), zero_based=True)
    x = [t for t in range(1, p) if rng.random() < 0.4]
    y = [t for t in range(1, p) if rng.random() < 0.4] if bivincular else []
    return BivincularPattern(tau, frozenset(x), frozenset(y))


class CountTests(PermCumulantsTestCase):
    """Tests for the simple counters and their batch versions."""

    def test_gamma(self) -> None:
        self.assertEqual(4, gamma_p(Permutation.identity(4), 1))
        self.assertEqual(2, gamma_p((2, 1, 4, 3), 2))
        self.assertEqual(0, gamma_p((2, 1, 4, 3), 3))
        with self.assertRaises(ParameterError):
            gamma_p((1,), 0)

    def test_gamma_mean(self) -> None:
        mean = exact_moments(lambda sigma: gamma_p(sigma, 2), 5, "1", (1,))[1]
        self.assertEqual(Fraction(1, 2), mean)

    def test_gamma_batch(self) -> None:
        samples = ewens_sample_batch(12, 1.5, 100, substream(1, 0))
        for p in range(1, 5):
            expected = [gamma_p(row, p) for row in samples.tolist()]
            np.testing.assert_array_equal(expected, gamma_batch(samples, p))

    def test_exceedances(self) -> None:
        self.assertEqual(5, exceedance_count(Permutation.identity(5)))
        self.assertEqual(1, exceedance_count((2, 1)))
        self.assertEqual(Fraction(1), f_function(Permutation.identity(5), Fraction(1)))
        self.assertEqual(Fraction(1, 2), f_function((2, 1), 1))
        np.testing.assert_array_equal([[True, False]], exceedance_batch(np.array([[2, 1]])))

    def test_f_interpolates(self) -> None:
        sigma = Permutation((3, 1, 2, 4))
        # running exceedance counts 0, 1, 1, 1, 2
        self.assertEqual(Fraction(1, 4), f_function(sigma, Fraction(1, 4)))
        self.assertEqual(Fraction(1, 8), f_function(sigma, Fraction(1, 8)))
        self.assertEqual(Fraction(3, 8), f_function(sigma, Fraction(7, 8)))
        self.assertEqual(0, f_function(sigma, 0))
        self.assertAlmostEqual(0.375, f_function(sigma, 0.875))
        with self.assertRaises(ParameterError):
            f_function(sigma, Fraction(3, 2))

    def test_f_nondecreasing(self) -> None:
        xs = [Fraction(k, 20) for k in range(21)]
        for n in range(1, 10):
            for sigma in _random_permutations(n, 30, 40 + n):
                values = [f_function(sigma, x) for x in xs]
                with self.subTest(sigma=sigma.images):
                    self.assertEqual(sorted(values), values)

    def test_f_batch(self) -> None:
        samples = ewens_sample_batch(9, 2.0, 50, substream(2, 0))
        xs = [0.0, 0.2, 0.5, 0.75, 1.0]
        expected = [[f_function(row, x) for x in xs] for row in samples.tolist()]
        np.testing.assert_allclose(expected, f_batch(samples, xs))

    def test_adjacencies(self) -> None:
        self.assertEqual(2, adjacency_count(Permutation.identity(3)))
        self.assertEqual(5, adjacency_count((6, 5, 4, 3, 2, 1)))
        total = sum(adjacency_count(sigma) for sigma, _ in enumerate_ewens(3, 1))
        self.assertEqual(8, total)
        samples = ewens_sample_batch(10, 1.0, 50, substream(3, 0))
        np.testing.assert_array_equal([adjacency_count(row) for row in samples.tolist()], adjacency_batch(samples))


class PatternTests(PermCumulantsTestCase):
    """Tests for dashed and bivincular patterns."""

    def test_pattern_validation(self) -> None:
        with self.assertRaises(StructureError):
            DashedPattern((1, 2), [2])
        with self.assertRaises(CapacityError):
            DashedPattern(range(1, 8))
        with self.assertRaises(StructureError):
            parse_pattern({"X": [1]})

    def test_parse_pattern(self) -> None:
        dashed = parse_pattern({"tau": [1, 3, 2], "X": [1]})
        self.assertIsInstance(dashed, DashedPattern)
        self.assertEqual((3, 1), (dashed.p, dashed.q))
        self.assertEqual({"tau": [1, 3, 2], "X": [1]}, dashed.to_json())
        self.assertEqual("(132, [1])", str(dashed))
        bivincular = parse_pattern({"tau": [1, 2], "X": [], "Y": [1]})
        self.assertEqual(frozenset({1}), bivincular.Y)
        self.assertEqual(BivincularPattern(Permutation((1, 2)), frozenset({1}), frozenset()), bivincular.inverse())

    def test_examples(self) -> None:
        self.assertEqual(3, count_dashed((3, 2, 1), DashedPattern((2, 1))))
        self.assertEqual(3, inversion_count((3, 2, 1)))
        self.assertEqual(1, count_dashed((3, 1, 2), DashedPattern((2, 1), [1])))
        self.assertEqual(1, descent_count((3, 1, 2)))
        self.assertEqual(0, count_dashed((1, 2), DashedPattern((1, 2, 3))))
        pattern = BivincularPattern(Permutation((1, 2, 3)), frozenset({1}), frozenset({1}))
        self.assertEqual(1, count_bivincular(Permutation.identity(3), pattern))

    def test_descent_mean(self) -> None:
        mean = exact_moments(lambda sigma: count_dashed(sigma, DashedPattern((2, 1), [1])), 5, "1", (1,))[1]
        self.assertEqual(Fraction(2, 5), mean / 5)

    def test_bivincular_without_y_is_dashed(self) -> None:
        rng = substream(4, 0)
        for sigma in _random_permutations(7, 100, 4):
            pattern = _random_pattern(rng, bivincular=False)
            self.assertEqual(count_dashed(sigma, pattern), count_bivincular(sigma, pattern))

    def test_classical_patterns_partition_subsets(self) -> None:
        """Each p-subset of positions realises exactly one pattern of S_p."""
        for n in range(1, 7):
            if n <= 4:
                perms = [Permutation(images) for images in itertools.permutations(range(1, n + 1))]
            else:
                perms = _random_permutations(n, 10, 50 + n)
            for p in range(1, n + 1):
                taus = [DashedPattern(tau) for tau in itertools.permutations(range(1, p + 1))]
                for sigma in perms:
                    with self.subTest(sigma=sigma.images, p=p):
                        self.assertEqual(math.comb(n, p), sum(count_dashed(sigma, tau) for tau in taus))

    def test_inverse_duality(self) -> None:
        """Occurrences in the inverse are occurrences of the inverse pattern."""
        rng = substream(9, 0)
        for n in range(1, 8):
            for sigma in _random_permutations(n, 50, 60 + n):
                pattern = _random_pattern(rng, bivincular=True)
                with self.subTest(sigma=sigma.images, pattern=str(pattern)):
                    self.assertEqual(
                        count_bivincular(sigma, pattern),
                        count_bivincular(sigma.inverse(), pattern.inverse()),
                    )

    def test_brute_force_matches_definition(self) -> None:
        """Recursive counting agrees with checking every subset of positions."""
        rng = substream(5, 0)
        for sigma in _random_permutations(6, 40, 5):
            pattern = _random_pattern(rng, bivincular=True)
            by_rank = pattern.tau.inverse().images
            expected = 0
            for positions in itertools.combinations(range(sigma.size), pattern.p):
                values = [sigma.images[k] for k in positions]
                if any(positions[x] != positions[x - 1] + 1 for x in pattern.X):
                    continue
                if any((values[a] < values[b]) != (pattern.tau.images[a] < pattern.tau.images[b])
                       for a, b in itertools.combinations(range(pattern.p), 2)):
                    continue
                if any(values[by_rank[y] - 1] != values[by_rank[y - 1] - 1] + 1 for y in pattern.Y):
                    continue
                expected += 1
            self.assertEqual(expected, count_bivincular(sigma, pattern))

    def test_dashed_counter(self) -> None:
        patterns = [
            DashedPattern((2, 1)),
            DashedPattern((2, 1), [1]),
            DashedPattern((1, 3, 2), [1]),
            DashedPattern((1, 2, 3)),
            DashedPattern((2, 4, 1, 3), [2]),
            DashedPattern((1, 3, 2, 4)),
        ]
        samples = ewens_sample_batch(9, 1.0, 30, substream(6, 0))
        for pattern in patterns:
            counter = DashedCounter(pattern)
            expected = [count_dashed(row, pattern) for row in samples.tolist()]
            with self.subTest(pattern=str(pattern)):
                np.testing.assert_array_equal(expected, counter.batch(samples))
        self.assertFalse(DashedCounter(DashedPattern((1, 3, 2, 4))).fast)
        self.assertEqual(0, DashedCounter(DashedPattern((1, 2, 3))).count((2, 1)))
        with self.assertRaises(StructureError):
            DashedCounter(BivincularPattern(Permutation((1, 2)), frozenset(), frozenset({1})))


class LocalStatisticTests(PermCumulantsTestCase):
    """Tests for local statistics."""

    def test_from_json(self) -> None:
        data = [[{"var": "s", "j": 1}, ">=", {"var": "i", "j": 1}]]
        statistic = LocalStatistic.from_json(1, data)
        self.assertEqual(exceedance_statistic(), statistic)
        self.assertEqual({"p": 1, "constraints": [[{"var": "s", "j": 1, "d": 0}, ">=", {"var": "i", "j": 1, "d": 0}]]}, statistic.to_json())

    def test_invalid(self) -> None:
        with self.assertRaises(StructureError):
            Expression("t", 1)
        with self.assertRaises(StructureError):
            Constraint(Expression("i", 1), "!=", Expression("s", 1))
        with self.assertRaises(StructureError):
            LocalStatistic(1, (Constraint(Expression("i", 2), "=", Expression("s", 1)),))
        with self.assertRaises(StructureError):
            LocalStatistic.from_json(1, [[{"var": "i", "j": 1}, "="]])

    def test_encodings(self) -> None:
        ascending, descending = adjacency_statistics()
        descents = dashed_as_local(DashedPattern((2, 1), [1]))
        for sigma in _random_permutations(8, 100, 7):
            self.assertEqual(exceedance_count(sigma), count_local(sigma, exceedance_statistic()))
            self.assertEqual(
                adjacency_count(sigma),
                count_local(sigma, ascending) + count_local(sigma, descending),
            )
            self.assertEqual(descent_count(sigma), count_local(sigma, descents))

    def test_bivincular_encoding(self) -> None:
        rng = substream(8, 0)
        for sigma in _random_permutations(6, 60, 8):
            pattern = _random_pattern(rng, bivincular=True)
            self.assertEqual(count_bivincular(sigma, pattern), count_local(sigma, bivincular_as_local(pattern)))


class LimitTests(PermCumulantsTestCase):
    """Tests for the closed-form limits and exact finite-N moments."""

    def test_simple_limits(self) -> None:
        self.assertEqual(Fraction(3, 8), f_limit(Fraction(1, 2)))
        self.assertEqual(Fraction(1, 12), k_covariance(1, 1))
        self.assertEqual(Fraction(1, 2), dashed_mean(2, 1))
        self.assertEqual(Fraction(1, 36), dashed_mean(3, 0))
        self.assertEqual(Fraction(2, 3), poisson_cycles(Fraction(2), 3))
        self.assertAlmostEqual(0.5, poisson_cycles(1.0, 2))
        with self.assertRaises(ParameterError):
            dashed_mean(2, 2)

    def test_theoretical_limits(self) -> None:
        self.assertEqual(Fraction(1, 12), theoretical_limits("K", x=Fraction(1), y=Fraction(1)))
        self.assertEqual(2, theoretical_limits("adjacency_lambda"))
        self.assertEqual(Fraction(1, 2), theoretical_limits("dashed_mean", p=2, q=1))
        with self.assertRaises(ParameterError):
            theoretical_limits("unknown")
        with self.assertRaises(ParameterError):
            theoretical_limits("f_limit", y=1)

    def test_k_quadrature(self) -> None:
        grid = [0.0, 0.25, 0.5, 0.75, 1.0]
        for x, y in itertools.product(grid, repeat=2):
            with self.subTest(x=x, y=y):
                self.assertAlmostEqual(float(k_covariance(x, y)), k_covariance_quadrature(x, y), delta=1e-10)
        self.assertEqual(k_covariance(Fraction(1, 3), Fraction(3, 4)), k_covariance(Fraction(3, 4), Fraction(1, 3)))

    def test_exceedance_moments(self) -> None:
        """The closed forms match enumeration for N <= 6."""
        self.assertEqual(Fraction(3, 5), exceedance_moments(5, "1", 3)["mean_i"])
        for n in range(2, 7):
            for theta in THETAS:
                law = list(enumerate_ewens(n, theta))

                def expect(positions: tuple[int, ...]) -> Fraction:
                    return sum(
                        (w for sigma, w in law if all(sigma(k) >= k for k in positions)),
                        Fraction(0),
                    )

                for i, j in itertools.permutations(range(1, n + 1), 2):
                    moments = exceedance_moments(n, theta, i, j)
                    self.assertEqual(expect((i,)), moments["mean_i"])
                    self.assertEqual(expect((i,)) * (1 - expect((i,))), moments["var_i"])
                    self.assertEqual(expect((i, j)) - expect((i,)) * expect((j,)), moments["cov"])
        with self.assertRaises(ParameterError):
            exceedance_moments(4, "1", 2, 2)
        with self.assertRaises(ParameterError):
            exceedance_moments(4, "1", 5)

    def test_f_expectation_and_covariance(self) -> None:
        n, theta = 5, "2"
        xs = [Fraction(1, 4), Fraction(1, 2), Fraction(9, 10)]
        law = list(enumerate_ewens(n, theta))
        values = [[f_function(sigma, x) for x in xs] for sigma, _ in law]
        means = [sum((w * row[k] for (_, w), row in zip(law, values)), Fraction(0)) for k in range(len(xs))]
        for x, mean in zip(xs, means):
            self.assertEqual(mean, f_expectation(n, theta, x))
        covariance = z_covariance(n, 2.0, [float(x) for x in xs])
        for a, b in itertools.product(range(len(xs)), repeat=2):
            exact = n * sum(
                (w * (row[a] - means[a]) * (row[b] - means[b]) for (_, w), row in zip(law, values)),
                Fraction(0),
            )
            self.assertAlmostEqual(float(exact), covariance[a, b], places=10)
