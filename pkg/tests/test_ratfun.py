"""Tests for the ratfun module."""
import itertools
from fractions import Fraction

from permcumulants.base import CapacityError, ParameterError, PoleError, substream
from permcumulants.ratfun import MINUS_INFINITY, Poly, RatFun, tech_product
from tests.utils import PermCumulantsTestCase


def _n() -> RatFun:
    return RatFun.variable()


class PolyTests(PermCumulantsTestCase):
    """Tests for the Poly class."""

    def test_coefficients_and_degree(self) -> None:
        poly = Poly.from_coefficients([1, 0, Fraction(1, 2)])
        self.assertEqual((1, 0, Fraction(1, 2)), poly.coefficients)
        self.assertEqual(2, poly.degree)
        self.assertEqual(Fraction(1, 2), poly.leading_coefficient)

    def test_zero(self) -> None:
        zero = Poly.from_coefficients([])
        self.assertTrue(zero.is_zero)
        self.assertEqual(MINUS_INFINITY, zero.degree)
        self.assertEqual((), zero.coefficients)

    def test_gcd_is_monic(self) -> None:
        """gcd((2N - 2)(N + 1), 3(N - 1)) is N - 1."""
        a = Poly.from_coefficients([-2, 0, 2])
        b = Poly.from_coefficients([-3, 3])
        self.assertEqual((-1, 1), a.gcd(b).coefficients)

    def test_evaluate(self) -> None:
        self.assertEqual(Fraction(13, 2), Poly.from_coefficients([Fraction(1, 2), 1, 1]).evaluate(2))


class RatFunTests(PermCumulantsTestCase):
    """Tests for the RatFun class."""

    def test_canonical_form(self) -> None:
        """Equal functions have equal representations."""
        n = _n()
        first = (n * n - 1) / (2 * n - 2)
        second = (n + 1) / 2
        self.assertEqual(first, second)
        self.assertEqual(hash(first), hash(second))
        self.assertEqual((1,), first.denominator.coefficients)

    def test_degree(self) -> None:
        n = _n()
        self.assertEqual(-3, (1 / (n * n * (n - 1))).degree)
        self.assertEqual(1, ((n * n + 1) / (n - 3)).degree)
        self.assertEqual(MINUS_INFINITY, (n - n).degree)

    def test_arithmetic_with_scalars(self) -> None:
        n = _n()
        self.assertEqual(RatFun.constant(3), n + 3 - n)
        self.assertEqual(Fraction(1, 2), (n / (2 * n)).evaluate(5))
        self.assertEqual(RatFun.one(), (n - 1) ** 2 / ((n - 1) * (n - 1)))
        self.assertEqual(1 / n, n ** -1)

    def test_evaluate(self) -> None:
        n = _n()
        value = (n + Fraction(1, 2)) / (n * (n - 1))
        self.assertEqual(Fraction(7, 12), value.evaluate(3))
        with self.assertRaises(PoleError):
            value.evaluate(1)

    def test_evaluation_is_a_ring_homomorphism(self) -> None:
        """Evaluating after an operation equals operating on the values, away from poles."""
        rng = substream(17, 0)

        def random_ratfun() -> RatFun:
            numerator = [int(c) for c in rng.integers(-5, 6, size=int(rng.integers(1, 4)))]
            denominator = [int(c) for c in rng.integers(-5, 6, size=int(rng.integers(1, 3)))]
            denominator.append(int(rng.integers(1, 4)))
            return RatFun(Poly.from_coefficients(numerator), Poly.from_coefficients(denominator))

        operations = {
            "add": lambda a, b: a + b,
            "sub": lambda a, b: a - b,
            "mul": lambda a, b: a * b,
            "div": lambda a, b: a / b,
        }
        for name, operation in operations.items():
            checked = 0
            while checked < 20:
                f, g = random_ratfun(), random_ratfun()
                if name == "div" and g.is_zero:
                    continue
                point = Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 8)))
                result = operation(f, g)
                try:
                    values = f.evaluate(point), g.evaluate(point), result.evaluate(point)
                except PoleError:
                    continue
                if name == "div" and values[1] == 0:
                    continue
                with self.subTest(operation=name, f=str(f), g=str(g), point=point):
                    self.assertEqual(operation(values[0], values[1]), values[2])
                    again = RatFun(result.numerator, result.denominator)
                    self.assertEqual(result.numerator.coefficients, again.numerator.coefficients)
                    self.assertEqual(result.denominator.coefficients, again.denominator.coefficients)
                checked += 1

    def test_division_by_zero(self) -> None:
        with self.assertRaises(ZeroDivisionError):
            _ = _n() / RatFun.zero()

    def test_pretty(self) -> None:
        n = _n()
        self.assertEqual("1/(N²(N−1))", (1 / (n * n * (n - 1))).pretty())
        self.assertEqual("0", RatFun.zero().pretty())
        self.assertEqual("−1/N", (-1 / n).pretty())
        self.assertEqual("N", n.pretty())

    def test_to_json(self) -> None:
        document = (1 / (_n() - 1)).to_json()
        self.assertEqual("1/(N−1)", document["ratfun"])
        self.assertEqual(["1"], document["numerator"])
        self.assertEqual(["-1", "1"], document["denominator"])
        self.assertEqual(-1, document["degree"])


class TechProductTests(PermCumulantsTestCase):
    """Tests for tech_product."""

    def test_single_shift(self) -> None:
        """With one shift a the product is X / (X - a)."""
        n = _n()
        self.assertEqual(n / (n - 2), tech_product([2]))

    def test_decay(self) -> None:
        """R - 1 decays at least like X ** -len(a), for every small vector of shifts."""
        for length in range(1, 5):
            for shifts in itertools.product(range(1, 4), repeat=length):
                with self.subTest(shifts=shifts):
                    self.assertLessEqual((tech_product(list(shifts)) - 1).degree, -length)

    def test_guards(self) -> None:
        with self.assertRaises(ParameterError):
            tech_product([0])
        with self.assertRaises(CapacityError):
            tech_product([1] * 7)
