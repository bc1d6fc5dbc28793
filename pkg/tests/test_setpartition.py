"""Tests for the setpartition module."""
import itertools
from fractions import Fraction

import sympy

from permcumulants.base import (
    CapacityError,
    MissingMomentError,
    ParameterError,
    StructureError,
    ZeroMomentError,
    substream,
)
from permcumulants.ratfun import RatFun
from permcumulants.setpartition import (
    DisjointSet,
    MomentFunctional,
    SetPartition,
    all_partitions,
    bell_number,
    cumulant_from_moments,
    exact_functional,
    join,
    meet,
    mobius_to_top,
    parse_partition,
    quasi_factor_U,
    refines,
    truncated_cumulant,
)
from tests.utils import PermCumulantsTestCase


class DisjointSetTests(PermCumulantsTestCase):
    """Tests for the DisjointSet class."""

    def test_unite(self) -> None:
        classes = DisjointSet(range(1, 6))
        self.assertTrue(classes.unite(1, 2))
        self.assertTrue(classes.unite(4, 5))
        self.assertFalse(classes.unite(2, 1))
        self.assertEqual(3, len(classes))
        self.assertEqual(classes.find(1), classes.find(2))
        self.assertNotEqual(classes.find(1), classes.find(4))
        self.assertEqual([[1, 2], [3], [4, 5]], sorted(sorted(c) for c in classes.classes()))


class SetPartitionTests(PermCumulantsTestCase):
    """Tests for the SetPartition class and the lattice operations."""

    def test_canonical_form(self) -> None:
        self.assertEqual(SetPartition([[3, 1], [2]]), SetPartition([[2], [1, 3]]))
        self.assertEqual(((1, 3), (2,)), SetPartition([[2], [3, 1]]).blocks)
        self.assertEqual("{1,3}{2}", str(SetPartition([[2], [3, 1]])))

    def test_invalid(self) -> None:
        with self.assertRaises(StructureError):
            SetPartition([[1, 2], [2, 3]])
        with self.assertRaises(StructureError):
            SetPartition([[1], []])

    def test_properties(self) -> None:
        pi = SetPartition([[1, 2], [3], [4, 5, 6]])
        self.assertEqual(6, pi.n)
        self.assertEqual(3, len(pi))
        self.assertEqual(3, pi.rank)
        self.assertEqual((4, 5, 6), pi.block_of(5))
        self.assertEqual([[1, 2], [3], [4, 5, 6]], pi.to_json())
        self.assertEqual(pi, SetPartition.from_labels({1: "a", 2: "a", 3: "b", 4: "c", 5: "c", 6: "c"}))

    def test_all_partitions_counts(self) -> None:
        for n, expected in enumerate([1, 1, 2, 5, 15, 52, 203], start=0):
            self.assertEqual(expected, bell_number(n))
            if n >= 1:
                partitions = list(all_partitions(n))
                self.assertEqual(expected, len(partitions))
                self.assertEqual(expected, len(set(partitions)))

    def test_all_partitions_guard(self) -> None:
        with self.assertRaises(ParameterError):
            list(all_partitions(0))
        with self.assertRaises(ParameterError):
            list(all_partitions(13))

    def test_join_meet(self) -> None:
        a = SetPartition([[1, 2], [3], [4]])
        b = SetPartition([[1], [2, 3], [4]])
        self.assertEqual(SetPartition([[1, 2, 3], [4]]), join(a, b))
        self.assertEqual(SetPartition.singletons(4), meet(a, b))
        with self.assertRaises(StructureError):
            join(a, SetPartition.singletons(3))

    def test_lattice_laws(self) -> None:
        """Join and meet are the least upper and greatest lower bounds, for every pair up to n = 6."""
        for n in range(1, 7):
            partitions = list(all_partitions(n))
            for a, b in itertools.product(partitions, repeat=2):
                upper, lower = join(a, b), meet(a, b)
                self.assertEqual(upper, join(b, a))
                self.assertEqual(lower, meet(b, a))
                self.assertTrue(refines(a, upper) and refines(b, upper))
                self.assertTrue(refines(lower, a) and refines(lower, b))
                self.assertEqual(a, join(a, meet(a, b)))
                self.assertEqual(a, meet(a, join(a, b)))
                self.assertEqual(refines(a, b), join(a, b) == b)

    def test_associativity(self) -> None:
        for n in range(1, 5):
            partitions = list(all_partitions(n))
            for a, b, c in itertools.product(partitions, repeat=3):
                self.assertEqual(join(join(a, b), c), join(a, join(b, c)))
                self.assertEqual(meet(meet(a, b), c), meet(a, meet(b, c)))

    def test_rank_subadditive(self) -> None:
        for n in range(1, 7):
            partitions = list(all_partitions(n))
            for a, b in itertools.product(partitions, repeat=2):
                self.assertLessEqual(join(a, b).rank, a.rank + b.rank)

    def test_mobius(self) -> None:
        """Möbius values to the top sum to zero above every partition below the top."""
        self.assertEqual(2, mobius_to_top(SetPartition.singletons(3)))
        self.assertEqual(1, mobius_to_top(SetPartition.top(4)))
        for n in range(2, 7):
            partitions = list(all_partitions(n))
            top = SetPartition.top(n)
            for lower in partitions:
                if lower == top:
                    continue
                with self.subTest(lower=str(lower)):
                    self.assertEqual(0, sum(mobius_to_top(pi) for pi in partitions if refines(lower, pi)))

    def test_parse_partition(self) -> None:
        self.assertEqual(SetPartition([[1], [2]]), parse_partition([[1], [2]], 2))
        with self.assertRaises(StructureError):
            parse_partition([[1], [3]], 2)
        with self.assertRaises(StructureError):
            parse_partition(5)


class CumulantTests(PermCumulantsTestCase):
    """Tests for the moment/cumulant calculus."""

    def test_bernoulli(self) -> None:
        """Cumulants of one Bernoulli(p) variable repeated ell times."""
        p = Fraction(1, 3)
        moments: MomentFunctional[Fraction] = MomentFunctional(lambda subset: p, Fraction(1))
        self.assertEqual(p, cumulant_from_moments(moments, 1))
        self.assertEqual(p - p**2, cumulant_from_moments(moments, 2))
        self.assertEqual(p - 3 * p**2 + 2 * p**3, cumulant_from_moments(moments, 3))

    def test_independent_factors_vanish(self) -> None:
        """A factorising functional has vanishing mixed cumulants."""
        factors = {1: Fraction(1, 2), 2: Fraction(2, 3), 3: Fraction(5, 7), 4: Fraction(3)}
        moments = MomentFunctional.product(factors, Fraction(1))
        for ell in range(2, 5):
            self.assertEqual(0, cumulant_from_moments(moments, ell))

    def test_rational_function_values(self) -> None:
        n = RatFun.variable()
        moments = MomentFunctional.from_mapping(
            {(1,): 1 / n, (2,): 1 / n, (1, 2): 1 / (n * (n - 1))}, RatFun.one()
        )
        self.assertEqual(1 / (n * n * (n - 1)), cumulant_from_moments(moments, 2))

    def test_missing_moment(self) -> None:
        moments = MomentFunctional.from_mapping({(1,): Fraction(1)}, Fraction(1))
        with self.assertRaises(MissingMomentError):
            cumulant_from_moments(moments, 2)

    def test_capacity(self) -> None:
        moments: MomentFunctional[Fraction] = MomentFunctional(lambda subset: Fraction(1), Fraction(1))
        with self.assertRaises(CapacityError):
            cumulant_from_moments(moments, 11)

    def test_exact_functional(self) -> None:
        """Two fair coins that are always equal have covariance 1/4."""
        moments = exact_functional([[0, 0], [1, 1]], [Fraction(1, 2), Fraction(1, 2)])
        self.assertEqual(Fraction(1, 4), cumulant_from_moments(moments, 2))

    def test_log_generating_function(self) -> None:
        """Cumulants are the mixed first-order coefficients of log E[exp(t . X)]."""
        rng = substream(21, 0)
        for ell in range(1, 4):
            for _ in range(5):
                outcomes = int(rng.integers(2, 5))
                values = [[int(v) for v in rng.integers(0, 3, size=ell)] for _ in range(outcomes)]
                raw = [int(w) for w in rng.integers(1, 6, size=outcomes)]
                weights = [Fraction(w, sum(raw)) for w in raw]
                t = sympy.symbols(f"t1:{ell + 1}")
                mgf = sum(
                    sympy.Rational(weight.numerator, weight.denominator)
                    * sympy.exp(sum(tj * x for tj, x in zip(t, row)))
                    for row, weight in zip(values, weights)
                )
                expected = sympy.simplify(sympy.diff(sympy.log(mgf), *t).subs({tj: 0 for tj in t}))
                cumulant = cumulant_from_moments(exact_functional(values, weights), ell)
                with self.subTest(values=values, weights=raw):
                    self.assertEqual(sympy.Rational(cumulant.numerator, cumulant.denominator), expected)

    def test_truncated_cumulant(self) -> None:
        moments = exact_functional(
            [[1, 2, 0], [0, 1, 3], [2, 2, 1]],
            [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)],
        )
        full = truncated_cumulant(moments, SetPartition.singletons(3))
        self.assertEqual(cumulant_from_moments(moments, 3), full)
        # forbidding the bottom leaves nothing
        self.assertEqual(0, truncated_cumulant(moments, SetPartition.singletons(3), [SetPartition.top(3)]))
        with self.assertRaises(StructureError):
            truncated_cumulant(moments, SetPartition.singletons(3), [SetPartition.singletons(2)])

    def test_quasi_factor_round_trip(self) -> None:
        """The factors U_d over the subsets of delta multiply back to M_delta."""
        values = {
            frozenset(subset): Fraction(2 + sum(subset), 3 + len(subset))
            for size in range(1, 5)
            for subset in itertools.combinations(range(1, 5), size)
        }
        moments = MomentFunctional.from_mapping(values, Fraction(1))
        for size in range(1, 5):
            for delta in itertools.combinations(range(1, 5), size):
                product = Fraction(1)
                for d_size in range(1, size + 1):
                    for d in itertools.combinations(delta, d_size):
                        product *= quasi_factor_U(moments, d)
                self.assertEqual(moments(delta), product)

    def test_quasi_factor_zero_moment(self) -> None:
        moments = MomentFunctional.from_mapping({(1,): Fraction(0)}, Fraction(1))
        with self.assertRaises(ZeroMomentError):
            quasi_factor_U(moments, [1])
