"""Exact polynomials and rational functions in one indeterminate N.

Coefficients are arbitrary-precision rationals. Arithmetic, gcd and
factorisation are delegated to sympy's dense polynomials over QQ; the classes
here add the canonical form (coprime, monic denominator), the degree with a
distinguished value for zero, and the report formats.
"""
import itertools
import math
import re
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Final, Union

import sympy

from permcumulants.base import CapacityError, ParameterError, PoleError

N: Final = sympy.Symbol("N")

# Degree of the zero polynomial / zero function; compares below every integer.
MINUS_INFINITY: Final[float] = -math.inf

Degree = Union[int, float]
Scalar = Union[int, Fraction]

_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _rational(value: Scalar) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value: sympy.Expr) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _sympy_poly(coefficients: Sequence[Scalar]) -> sympy.Poly:
    descending = [_rational(c) for c in reversed(coefficients)] or [sympy.Integer(0)]
    return sympy.Poly(descending, N, domain=sympy.QQ)


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial in N with exact rational coefficients."""

    poly: sympy.Poly

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[Scalar]) -> "Poly":
        """Build from coefficients in ascending degree."""
        return cls(_sympy_poly(coefficients))

    @classmethod
    def constant(cls, value: Scalar) -> "Poly":
        return cls.from_coefficients([value])

    @classmethod
    def variable(cls) -> "Poly":
        return cls.from_coefficients([0, 1])

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        """Coefficients in ascending degree; empty for the zero polynomial."""
        if self.is_zero:
            return ()
        return tuple(_fraction(c) for c in reversed(self.poly.all_coeffs()))

    @property
    def is_zero(self) -> bool:
        return bool(self.poly.is_zero)

    @property
    def degree(self) -> Degree:
        if self.is_zero:
            return MINUS_INFINITY
        return int(self.poly.degree())

    @property
    def leading_coefficient(self) -> Fraction:
        return _fraction(self.poly.LC())

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(self.poly + other.poly)

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(self.poly - other.poly)

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(self.poly * other.poly)

    def __neg__(self) -> "Poly":
        return Poly(-self.poly)

    def scale(self, factor: Scalar) -> "Poly":
        return Poly(self.poly * _rational(factor))

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor."""
        return Poly(self.poly.gcd(other.poly))

    def exquo(self, other: "Poly") -> "Poly":
        """Exact quotient; ``other`` must divide ``self``."""
        return Poly(self.poly.exquo(other.poly))

    def evaluate(self, point: Scalar) -> Fraction:
        return _fraction(self.poly.eval(_rational(point)))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coefficients) + ")"


def _render_factor(expr: sympy.Expr, variable: str) -> str:
    text = str(expr).replace(str(N), variable)
    text = re.sub(r"\*\*(\d+)", lambda m: m.group(1).translate(_SUPERSCRIPTS), text)
    text = text.replace(" - ", "−").replace(" + ", "+").replace("*", "")
    if text.startswith("-"):
        text = "−" + text[1:]
    if isinstance(expr, sympy.Add):
        text = f"({text})"
    return text


def _factor_parts(poly: Poly, variable: str) -> tuple[Fraction, list[str]]:
    """Rational content and the rendered integer-primitive factors of ``poly``."""
    if poly.degree == 0:
        return poly.leading_coefficient, []
    content, factors = sympy.factor_list(poly.poly.as_expr(), N)
    ordered = sorted(
        factors,
        key=lambda item: (sympy.degree(item[0], N), str(item[0])),
    )
    parts = []
    for factor, multiplicity in ordered:
        text = _render_factor(factor, variable)
        if multiplicity > 1:
            text += str(multiplicity).translate(_SUPERSCRIPTS)
        parts.append(text)
    return _fraction(content), parts


def _join_parts(coefficient: int, parts: list[str]) -> tuple[str, int]:
    if abs(coefficient) != 1 or not parts:
        parts = [str(abs(coefficient))] + parts
    return "".join(parts), len(parts)


@dataclass(frozen=True, init=False)
class RatFun:
    """Rational function ``numerator / denominator`` in canonical form.

    The numerator and denominator are coprime and the denominator is monic,
    so equal functions have equal representations.
    """

    numerator: Poly
    denominator: Poly

    def __init__(self, numerator: Poly, denominator: Poly | None = None):
        if denominator is None:
            denominator = Poly.constant(1)
        if denominator.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if numerator.is_zero:
            numerator, denominator = numerator, Poly.constant(1)
        else:
            common = numerator.gcd(denominator)
            numerator = numerator.exquo(common)
            denominator = denominator.exquo(common)
            lead = denominator.leading_coefficient
            numerator = numerator.scale(1 / lead)
            denominator = denominator.scale(1 / lead)
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    @classmethod
    def constant(cls, value: Scalar) -> "RatFun":
        return cls(Poly.constant(value))

    @classmethod
    def variable(cls) -> "RatFun":
        return cls(Poly.variable())

    @classmethod
    def zero(cls) -> "RatFun":
        return cls.constant(0)

    @classmethod
    def one(cls) -> "RatFun":
        return cls.constant(1)

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    @property
    def degree(self) -> Degree:
        """``deg(numerator) - deg(denominator)``, or ``MINUS_INFINITY`` for zero."""
        if self.is_zero:
            return MINUS_INFINITY
        return int(self.numerator.degree) - int(self.denominator.degree)

    @staticmethod
    def _coerce(value: "RatFun | Scalar") -> "RatFun":
        if isinstance(value, RatFun):
            return value
        if isinstance(value, (int, Fraction)):
            return RatFun.constant(value)
        return NotImplemented

    def __add__(self, other: "RatFun | Scalar") -> "RatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFun(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun(-self.numerator, self.denominator)

    def __sub__(self, other: "RatFun | Scalar") -> "RatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: "RatFun | Scalar") -> "RatFun":
        return (-self) + other

    def __mul__(self, other: "RatFun | Scalar") -> "RatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFun(
            self.numerator * other.numerator,
            self.denominator * other.denominator,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: "RatFun | Scalar") -> "RatFun":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFun(
            self.numerator * other.denominator,
            self.denominator * other.numerator,
        )

    def __rtruediv__(self, other: "RatFun | Scalar") -> "RatFun":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "RatFun":
        if exponent < 0:
            return RatFun.one() / (self ** (-exponent))
        result = RatFun.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatFun.constant(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return (
            self.numerator.coefficients == other.numerator.coefficients
            and self.denominator.coefficients == other.denominator.coefficients
        )

    def __hash__(self) -> int:
        return hash((self.numerator.coefficients, self.denominator.coefficients))

    def evaluate(self, point: Scalar) -> Fraction:
        """Exact value at ``point``.

        Raises:
            PoleError: if the denominator vanishes at ``point``.
        """
        point = Fraction(point)
        denominator = self.denominator.evaluate(point)
        if denominator == 0:
            raise PoleError(point)
        return self.numerator.evaluate(point) / denominator

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"

    def pretty(self, variable: str = "N") -> str:
        """Factored display, e.g. ``1/(N²(N−1))``."""
        if self.is_zero:
            return "0"
        num_content, num_parts = _factor_parts(self.numerator, variable)
        den_content, den_parts = _factor_parts(self.denominator, variable)
        coefficient = num_content / den_content
        sign = "−" if coefficient < 0 else ""
        top, _ = _join_parts(coefficient.numerator, num_parts)
        bottom, count = _join_parts(coefficient.denominator, den_parts)
        if bottom == "1":
            return sign + top
        if count > 1:
            bottom = f"({bottom})"
        return f"{sign}{top}/{bottom}"

    def to_json(self) -> dict:
        return {
            "ratfun": self.pretty(),
            "numerator": [str(c) for c in self.numerator.coefficients],
            "denominator": [str(c) for c in self.denominator.coefficients],
            "degree": self.degree,
            "text": str(self),
        }


def tech_product(a: Sequence[int]) -> RatFun:
    """Alternating product over subsets of the shifts ``a``.

    Returns ``R(X) = prod over subsets d of a of (X - sum(d)) ** ((-1) ** |d|)``,
    which satisfies ``R(X) = 1 + O(X ** -len(a))``.

    Args:
        a: Positive integer shifts; at most six of them.

    Raises:
        ParameterError: if an entry is not a positive integer.
        CapacityError: for more than six shifts.
    """
    if len(a) > 6:
        raise CapacityError(f"tech_product takes at most 6 shifts, got {len(a)}")
    if any(not isinstance(value, int) or value < 1 for value in a):
        raise ParameterError(f"shifts must be positive integers, got {list(a)}")
    numerator = Poly.constant(1)
    denominator = Poly.constant(1)
    x = Poly.variable()
    for size in range(len(a) + 1):
        for subset in itertools.combinations(a, size):
            factor = x - Poly.constant(sum(subset))
            if size % 2 == 0:
                numerator = numerator * factor
            else:
                denominator = denominator * factor
    return RatFun(numerator, denominator)
