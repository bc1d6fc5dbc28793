"""Permutation statistics and their closed-form limits.

Single-permutation counters take a ``Permutation`` (or a 1-indexed sequence);
the ``*_batch`` variants take an int array of shape ``(samples, N)`` holding
one 1-indexed permutation per row, as produced by ``ewens_sample_batch``.
"""
import math
import operator
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

import numpy as np
from scipy import integrate

from permcumulants.base import CapacityError, ParameterError, StructureError
from permcumulants.permutation import (
    Permutation,
    PermutationLike,
    RealTheta,
    Theta,
    as_permutation,
    cycle_stats,
    parse_theta,
)

MAX_PATTERN_SIZE = 6
ADJACENCY_LAMBDA = 2

Real = Union[Fraction, int, float]


def gamma_p(sigma: PermutationLike, p: int) -> int:
    """Number of cycles of length ``p``."""
    if p < 1:
        raise ParameterError(f"cycle length must be positive, got {p}")
    return cycle_stats(sigma).by_length.get(p, 0)


def gamma_batch(samples: np.ndarray, p: int) -> np.ndarray:
    """``gamma_p`` of every row."""
    if p < 1:
        raise ParameterError(f"cycle length must be positive, got {p}")
    images = np.asarray(samples, dtype=np.int64) - 1
    start = np.broadcast_to(np.arange(images.shape[1]), images.shape)
    current = start
    returned_early = np.zeros(images.shape, dtype=bool)
    for _ in range(p - 1):
        current = np.take_along_axis(images, current, axis=1)
        returned_early |= current == start
    current = np.take_along_axis(images, current, axis=1)
    on_p_cycle = (current == start) & ~returned_early
    return on_p_cycle.sum(axis=1) // p


def exceedance_count(sigma: PermutationLike) -> int:
    """Number of weak exceedances ``sigma(i) >= i``."""
    images = as_permutation(sigma).images
    return sum(1 for position, value in enumerate(images, start=1) if value >= position)


def exceedance_batch(samples: np.ndarray) -> np.ndarray:
    """Boolean exceedance indicators, shape ``(samples, N)``."""
    samples = np.asarray(samples)
    return samples >= np.arange(1, samples.shape[1] + 1)


def _check_x(x: Real) -> None:
    if not 0 <= x <= 1:
        raise ParameterError(f"x must lie in [0, 1], got {x}")


def _interpolate(running: Sequence[Any], indicators: Sequence[Any], n: int, x: Real) -> Any:
    """Running sum at ``N x``, linear between grid points, divided by ``N``."""
    t = n * x
    k = math.floor(t)
    if k >= n:
        return running[n] / n
    return (running[k] + (t - k) * indicators[k]) / n


def f_function(sigma: PermutationLike, x: Real) -> Union[float, Fraction]:
    """Normalised running exceedance count ``F(x)``, exact for rational ``x``."""
    _check_x(x)
    sigma = as_permutation(sigma)
    indicators = [int(value >= position) for position, value in enumerate(sigma.images, start=1)]
    running = [0]
    for indicator in indicators:
        running.append(running[-1] + indicator)
    if isinstance(x, float):
        return float(_interpolate(running, indicators, sigma.size, x))
    return Fraction(_interpolate(running, indicators, sigma.size, Fraction(x)))


def f_batch(samples: np.ndarray, xs: Sequence[float]) -> np.ndarray:
    """``F(x)`` for every row and every ``x``, shape ``(samples, len(xs))``."""
    for x in xs:
        _check_x(x)
    indicators = exceedance_batch(samples).astype(np.float64)
    n = indicators.shape[1]
    running = np.concatenate([np.zeros((indicators.shape[0], 1)), np.cumsum(indicators, axis=1)], axis=1)
    columns = []
    for x in xs:
        t = n * float(x)
        k = min(math.floor(t), n)
        if k >= n:
            columns.append(running[:, n] / n)
        else:
            columns.append((running[:, k] + (t - k) * indicators[:, k]) / n)
    return np.stack(columns, axis=1)


def adjacency_count(sigma: PermutationLike) -> int:
    """Number of positions with ``sigma(i + 1) = sigma(i) ± 1``."""
    images = as_permutation(sigma).images
    return sum(1 for a, b in zip(images, images[1:]) if abs(a - b) == 1)


def adjacency_batch(samples: np.ndarray) -> np.ndarray:
    return (np.abs(np.diff(np.asarray(samples), axis=1)) == 1).sum(axis=1)


@dataclass(frozen=True)
class BivincularPattern:
    """A pattern ``tau`` with position adjacencies ``X`` and value adjacencies ``Y``.

    ``x`` in ``X`` asks for ``i[x + 1] = i[x] + 1``; ``y`` in ``Y`` asks for the
    ``(y + 1)``-th smallest selected value to follow the ``y``-th smallest.
    """

    tau: Permutation
    X: frozenset[int] = frozenset()
    Y: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        tau = as_permutation(self.tau)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "X", frozenset(int(x) for x in self.X))
        object.__setattr__(self, "Y", frozenset(int(y) for y in self.Y))
        if tau.size > MAX_PATTERN_SIZE:
            raise CapacityError(f"patterns are limited to size {MAX_PATTERN_SIZE}, got {tau.size}")
        if tau.size < 1:
            raise StructureError("a pattern needs at least one element")
        for name, values in (("X", self.X), ("Y", self.Y)):
            if not values <= set(range(1, tau.size)):
                raise StructureError(f"{name} = {sorted(values)} is not a subset of [{tau.size - 1}]")

    @property
    def p(self) -> int:
        return self.tau.size

    @property
    def q(self) -> int:
        return len(self.X)

    def inverse(self) -> "BivincularPattern":
        return BivincularPattern(self.tau.inverse(), self.Y, self.X)

    def to_json(self) -> dict:
        return {"tau": self.tau.to_json(), "X": sorted(self.X), "Y": sorted(self.Y)}

    def __str__(self) -> str:
        return f"({''.join(map(str, self.tau.images))}, {sorted(self.X)}, {sorted(self.Y)})"


class DashedPattern(BivincularPattern):
    """A bivincular pattern without value adjacencies."""

    def __init__(self, tau: PermutationLike, X: Iterable[int] = ()):
        super().__init__(as_permutation(tau), frozenset(X), frozenset())

    def to_json(self) -> dict:
        return {"tau": self.tau.to_json(), "X": sorted(self.X)}

    def __str__(self) -> str:
        return f"({''.join(map(str, self.tau.images))}, {sorted(self.X)})"


def parse_pattern(data: Mapping[str, Any]) -> BivincularPattern:
    """Pattern from ``{"tau": [...], "X": [...], "Y": [...]}``."""
    try:
        tau = Permutation(tuple(int(value) for value in data["tau"]))
        x = [int(value) for value in data.get("X", [])]
        y = [int(value) for value in data.get("Y", [])]
    except (KeyError, TypeError, ValueError) as e:
        raise StructureError(f"not a pattern: {data!r}") from e
    if y:
        return BivincularPattern(tau, frozenset(x), frozenset(y))
    return DashedPattern(tau, x)


def _count_occurrences(sigma: Permutation, pattern: BivincularPattern) -> int:
    p, n = pattern.p, sigma.size
    if p > n:
        return 0
    tau = pattern.tau.images
    images = sigma.images
    # pattern index of the y-th smallest value, 1-based
    by_rank = pattern.tau.inverse().images
    positions = [0] * p
    total = 0

    def place(t: int, lowest: int) -> None:
        nonlocal total
        if t == p:
            values = [images[position] for position in positions]
            if all(values[by_rank[y] - 1] == values[by_rank[y - 1] - 1] + 1 for y in pattern.Y):
                total += 1
            return
        if t >= 1 and t in pattern.X:
            candidates: Iterable[int] = (lowest,) if lowest < n else ()
        else:
            candidates = range(lowest, n - (p - t) + 1)
        for position in candidates:
            value = images[position]
            if all(
                (images[positions[u]] < value) == (tau[u] < tau[t]) for u in range(t)
            ):
                positions[t] = position
                place(t + 1, position + 1)

    place(0, 0)
    return total


def count_dashed(sigma: PermutationLike, pattern: BivincularPattern) -> int:
    """Occurrences of a dashed pattern; value adjacencies of ``pattern`` are ignored."""
    dashed = pattern if not pattern.Y else DashedPattern(pattern.tau, pattern.X)
    return _count_occurrences(as_permutation(sigma), dashed)


def count_bivincular(sigma: PermutationLike, pattern: BivincularPattern) -> int:
    """Occurrences of a bivincular pattern."""
    return _count_occurrences(as_permutation(sigma), pattern)


def inversion_count(sigma: PermutationLike) -> int:
    return count_dashed(sigma, DashedPattern((2, 1)))


def descent_count(sigma: PermutationLike) -> int:
    return count_dashed(sigma, DashedPattern((2, 1), (1,)))


class DashedCounter:
    """Fast occurrence counter for dashed patterns with at most three segments.

    A segment is a maximal run of pattern positions glued by ``X``. Each
    occurrence is determined by the start positions of the segments; the
    count is a contraction of per-segment validity vectors with pairwise
    order-constraint matrices.
    """

    def __init__(self, pattern: BivincularPattern):
        if pattern.Y:
            raise StructureError("DashedCounter does not handle value adjacencies")
        self.pattern = pattern
        tau = pattern.tau.images
        segments: list[list[int]] = [[0]]
        for t in range(1, pattern.p):
            if t in pattern.X:
                segments[-1].append(t)
            else:
                segments.append([t])
        self.segments = segments
        self.fast = len(segments) <= 3
        self._skip_outer = len(segments) == 3 and all(
            any(min(tau[a], tau[c]) < tau[b] < max(tau[a], tau[c]) for b in segments[1])
            for a in segments[0]
            for c in segments[2]
        )

    def _shifted(self, images: np.ndarray, offset: int) -> np.ndarray:
        return np.concatenate([images[offset:], np.zeros(offset, dtype=images.dtype)])

    def _validity(self, images: np.ndarray, segment: list[int]) -> np.ndarray:
        n = len(images)
        tau = self.pattern.tau.images
        valid = np.arange(n) + len(segment) <= n
        for u in range(len(segment)):
            for w in range(u + 1, len(segment)):
                shifted_u = self._shifted(images, u)
                shifted_w = self._shifted(images, w)
                valid &= (shifted_u < shifted_w) == (tau[segment[u]] < tau[segment[w]])
        return valid.astype(np.float64)

    def _order(self, images: np.ndarray, first: list[int], second: list[int]) -> np.ndarray:
        n = len(images)
        tau = self.pattern.tau.images
        starts = np.arange(n)
        allowed = starts[None, :] >= starts[:, None] + len(first)
        for u, a in enumerate(first):
            left = self._shifted(images, u)
            for w, b in enumerate(second):
                right = self._shifted(images, w)
                allowed &= (left[:, None] < right[None, :]) == (tau[a] < tau[b])
        return allowed.astype(np.float64)

    def count(self, sigma: PermutationLike | np.ndarray) -> int:
        if isinstance(sigma, np.ndarray):
            images = sigma.astype(np.int64)
        else:
            images = as_permutation(sigma).as_array()
        if self.pattern.p > len(images):
            return 0
        if not self.fast:
            return _count_occurrences(Permutation.from_array(images), self.pattern)
        valid = [self._validity(images, segment) for segment in self.segments]
        if len(self.segments) == 1:
            return int(round(valid[0].sum()))
        if len(self.segments) == 2:
            order = self._order(images, *self.segments)
            return int(round(valid[0] @ order @ valid[1]))
        first, middle, last = self.segments
        order_ab = self._order(images, first, middle)
        order_bc = self._order(images, middle, last)
        if self._skip_outer:
            total = np.einsum("a,b,c,ab,bc->", *valid, order_ab, order_bc, optimize=True)
        else:
            order_ac = self._order(images, first, last)
            total = np.einsum("a,b,c,ab,ac,bc->", *valid, order_ab, order_ac, order_bc, optimize=True)
        return int(round(float(total)))

    def batch(self, samples: np.ndarray) -> np.ndarray:
        return np.array([self.count(row) for row in np.asarray(samples)], dtype=np.int64)


_RELATIONS: dict[str, Callable[[int, int], bool]] = {
    "=": operator.eq,
    "<": operator.lt,
    "<=": operator.le,
    "≤": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "≥": operator.ge,
}


@dataclass(frozen=True)
class Expression:
    """``i[j] + d`` or ``s[j] + d``."""

    var: str
    j: int
    d: int = 0

    def __post_init__(self) -> None:
        if self.var not in ("i", "s"):
            raise StructureError(f"expressions use i or s, got {self.var!r}")
        if self.j < 1:
            raise StructureError(f"expression index must be positive, got {self.j}")

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Expression":
        try:
            return cls(str(data["var"]), int(data["j"]), int(data.get("d", 0)))
        except (KeyError, TypeError, ValueError) as e:
            raise StructureError(f"not an expression: {data!r}") from e

    def to_json(self) -> dict:
        return {"var": self.var, "j": self.j, "d": self.d}


@dataclass(frozen=True)
class Constraint:
    lhs: Expression
    relation: str
    rhs: Expression

    def __post_init__(self) -> None:
        if self.relation not in _RELATIONS:
            raise StructureError(f"unknown relation {self.relation!r}")

    @property
    def last(self) -> int:
        return max(self.lhs.j, self.rhs.j)

    def holds(self, values: Mapping[str, Sequence[int]]) -> bool:
        left = values[self.lhs.var][self.lhs.j - 1] + self.lhs.d
        right = values[self.rhs.var][self.rhs.j - 1] + self.rhs.d
        return _RELATIONS[self.relation](left, right)

    def to_json(self) -> list:
        return [self.lhs.to_json(), self.relation, self.rhs.to_json()]


@dataclass(frozen=True)
class LocalStatistic:
    """Count of index lists ``i[1..p]`` such that ``s[j] = sigma(i[j])`` satisfy every constraint."""

    p: int
    constraints: tuple[Constraint, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.p < 1:
            raise StructureError(f"a local statistic needs p >= 1, got {self.p}")
        if self.p > MAX_PATTERN_SIZE:
            raise CapacityError(f"local statistics are limited to p <= {MAX_PATTERN_SIZE}")
        for constraint in self.constraints:
            if constraint.last > self.p:
                raise StructureError(f"constraint refers to index {constraint.last} > p = {self.p}")

    @classmethod
    def from_json(cls, p: int, data: Iterable[Sequence[Any]]) -> "LocalStatistic":
        constraints = []
        for triple in data:
            if len(triple) != 3:
                raise StructureError(f"constraints are [lhs, relation, rhs] triples, got {triple!r}")
            lhs, relation, rhs = triple
            constraints.append(Constraint(Expression.from_json(lhs), str(relation), Expression.from_json(rhs)))
        return cls(p, tuple(constraints))

    def to_json(self) -> dict:
        return {"p": self.p, "constraints": [c.to_json() for c in self.constraints]}


def _anchor(constraint: Constraint, j: int, values: Mapping[str, Sequence[int]]) -> Optional[tuple[str, int]]:
    """Value forced on ``i[j]`` or ``s[j]`` by an equality with earlier indices."""
    if constraint.relation != "=":
        return None
    for here, there in ((constraint.lhs, constraint.rhs), (constraint.rhs, constraint.lhs)):
        if here.j == j and there.j < j:
            return here.var, values[there.var][there.j - 1] + there.d - here.d
    return None


def count_local(sigma: PermutationLike, statistic: LocalStatistic) -> int:
    """Brute-force count of a local statistic, anchoring on equality constraints."""
    sigma = as_permutation(sigma)
    n = sigma.size
    images = sigma.images
    inverse = sigma.inverse().images
    by_last: dict[int, list[Constraint]] = {}
    for constraint in statistic.constraints:
        by_last.setdefault(constraint.last, []).append(constraint)
    values: dict[str, list[int]] = {"i": [0] * statistic.p, "s": [0] * statistic.p}
    total = 0

    def assign(j: int) -> None:
        nonlocal total
        if j > statistic.p:
            total += 1
            return
        candidates: Iterable[int] = range(1, n + 1)
        for constraint in by_last.get(j, []):
            anchor = _anchor(constraint, j, values)
            if anchor is None:
                continue
            var, forced = anchor
            if not 1 <= forced <= n:
                return
            candidates = (forced if var == "i" else inverse[forced - 1],)
            break
        for position in candidates:
            values["i"][j - 1] = position
            values["s"][j - 1] = images[position - 1]
            if all(constraint.holds(values) for constraint in by_last.get(j, [])):
                assign(j + 1)

    assign(1)
    return total


def _i(j: int, d: int = 0) -> Expression:
    return Expression("i", j, d)


def _s(j: int, d: int = 0) -> Expression:
    return Expression("s", j, d)


def exceedance_statistic() -> LocalStatistic:
    return LocalStatistic(1, (Constraint(_s(1), ">=", _i(1)),))


def adjacency_statistics() -> tuple[LocalStatistic, LocalStatistic]:
    """Ascending and descending adjacencies; their counts add up to ``adjacency_count``."""
    return tuple(  # type: ignore[return-value]
        LocalStatistic(2, (Constraint(_i(2), "=", _i(1, 1)), Constraint(_s(2), "=", _s(1, step))))
        for step in (1, -1)
    )


def bivincular_as_local(pattern: BivincularPattern) -> LocalStatistic:
    constraints = []
    for t in range(1, pattern.p):
        if t in pattern.X:
            constraints.append(Constraint(_i(t + 1), "=", _i(t, 1)))
        else:
            constraints.append(Constraint(_i(t + 1), ">", _i(t)))
    by_rank = pattern.tau.inverse().images
    for y in range(1, pattern.p):
        lower, upper = by_rank[y - 1], by_rank[y]
        relation = "=" if y in pattern.Y else ">"
        constraints.append(Constraint(_s(upper), relation, _s(lower, 1 if y in pattern.Y else 0)))
    return LocalStatistic(pattern.p, tuple(constraints))


def dashed_as_local(pattern: BivincularPattern) -> LocalStatistic:
    return bivincular_as_local(DashedPattern(pattern.tau, pattern.X))


def poisson_cycles(theta: RealTheta, p: int) -> Union[Fraction, float]:
    """Limit Poisson parameter ``theta / p`` of ``gamma_p``."""
    if p < 1:
        raise ParameterError(f"cycle length must be positive, got {p}")
    if isinstance(theta, float):
        return theta / p
    return parse_theta(theta) / p


def f_limit(x: Real) -> Union[Fraction, float]:
    """Limit ``(1 - (1 - x) ** 2) / 2`` of ``F(x)``."""
    _check_x(x)
    if isinstance(x, float):
        return (1 - (1 - x) ** 2) / 2
    x = Fraction(x)
    return (1 - (1 - x) ** 2) / 2


def k_covariance(x: Real, y: Real) -> Union[Fraction, float]:
    """Limit covariance ``K(x, y)`` of ``sqrt(N) (F - E F)``."""
    _check_x(x)
    _check_x(y)
    if isinstance(x, float) or isinstance(y, float):
        a, b = float(min(x, y)), float(max(x, y))
        return a * a / 2 * (1 - b) - a**3 / 6 + a * a * b * b / 4
    a, b = Fraction(min(x, y)), Fraction(max(x, y))
    return a * a / 2 * (1 - b) - a**3 / 6 + a * a * b * b / 4


def k_covariance_quadrature(x: float, y: float) -> float:
    """``K(x, y)`` by adaptive quadrature of its defining integrals."""
    diagonal, _ = integrate.quad(lambda t: t * (1 - t), 0, min(x, y))

    # the integrand has a kink on the diagonal, so split there
    def inner(t: float) -> float:
        kink = [t] if 0 < t < y else None
        value, _ = integrate.quad(
            lambda u: min(t, u) * (1 - max(t, u)), 0, y, points=kink, epsabs=1e-14, epsrel=1e-13
        )
        return float(value)

    cross, _ = integrate.quad(inner, 0, x, points=[y] if 0 < y < x else None, epsabs=1e-14, epsrel=1e-13)
    return float(diagonal - cross)


def exceedance_moments(
    n: int,
    theta: Union[str, Theta],
    i: int,
    j: Optional[int] = None,
) -> dict[str, Fraction]:
    """Exact mean and variance of the exceedance indicator at ``i``, and the covariance with ``j``."""
    theta = parse_theta(theta)
    positions = [i] if j is None else [i, j]
    if any(not 1 <= k <= n for k in positions):
        raise ParameterError(f"positions must lie in [1, {n}], got {positions}")
    if j is not None and i == j:
        raise ParameterError("covariance needs two different positions")
    scale = n + theta - 1

    def mean(k: int) -> Fraction:
        return (n - k + theta) / scale

    def variance(k: int) -> Fraction:
        return (k - 1) * (n - k + theta) / scale**2

    result = {"mean_i": mean(i), "var_i": variance(i)}
    if j is not None:
        low, high = min(i, j), max(i, j)
        result["mean_j"] = mean(j)
        result["var_j"] = variance(j)
        result["cov"] = -(n - high + theta) * (low - 1) / (scale**2 * (n + theta - 2))
    return result


def f_expectation(n: int, theta: Union[str, RealTheta], x: Real) -> Union[Fraction, float]:
    """Exact ``E[F(x)]`` on ``S_n`` from the exceedance means."""
    _check_x(x)
    if isinstance(theta, float):
        value = float(theta)
        means = [(n - k + value) / (n + value - 1) for k in range(1, n + 1)]
        running = [0.0]
    else:
        exact = parse_theta(theta)
        means = [(n - k + exact) / (n + exact - 1) for k in range(1, n + 1)]
        running = [Fraction(0)]  # type: ignore[list-item]
    for mean in means:
        running.append(running[-1] + mean)
    point = x if isinstance(x, float) or isinstance(theta, float) else Fraction(x)
    return _interpolate(running, means, n, point)  # type: ignore[no-any-return]


def _f_weights(n: int, x: float) -> np.ndarray:
    """Coefficients of the exceedance indicators in ``N F(x)``."""
    t = n * x
    k = min(math.floor(t), n)
    weights = np.zeros(n)
    weights[:k] = 1.0
    if k < n:
        weights[k] = t - k
    return weights


def z_covariance(n: int, theta: float, xs: Sequence[float]) -> np.ndarray:
    """Exact covariance matrix of ``sqrt(N) (F(x) - E F(x))`` on ``S_n``, in floating point."""
    for x in xs:
        _check_x(x)
    theta = float(theta)
    if n < 2:
        raise ParameterError(f"covariances need N >= 2, got {n}")
    positions = np.arange(1, n + 1, dtype=np.float64)
    scale = n + theta - 1
    low = np.minimum.outer(positions, positions)
    high = np.maximum.outer(positions, positions)
    covariance = -(n - high + theta) * (low - 1) / (scale**2 * (n + theta - 2))
    np.fill_diagonal(covariance, (positions - 1) * (n - positions + theta) / scale**2)
    weights = np.stack([_f_weights(n, float(x)) for x in xs])
    return np.asarray(weights @ covariance @ weights.T / n)


def dashed_mean(p: int, q: int) -> Fraction:
    """Limit ``1 / (p! (p - q)!)`` of the normalised occurrence count."""
    if not 0 <= q < p:
        raise ParameterError(f"need 0 <= q < p, got p={p}, q={q}")
    return Fraction(1, math.factorial(p) * math.factorial(p - q))


def theoretical_limits(kind: str, **args: Any) -> Any:
    """Closed-form limit values by name."""
    limits: dict[str, Callable[..., Any]] = {
        "poisson_cycles": poisson_cycles,
        "f_limit": f_limit,
        "K": k_covariance,
        "exceedance_moments": exceedance_moments,
        "dashed_mean": dashed_mean,
        "adjacency_lambda": lambda: ADJACENCY_LAMBDA,
    }
    if kind not in limits:
        raise ParameterError(f"unknown limit {kind!r}; choose from {sorted(limits)}")
    try:
        return limits[kind](**args)
    except TypeError as e:
        raise ParameterError(f"bad arguments for {kind}: {e}") from e
