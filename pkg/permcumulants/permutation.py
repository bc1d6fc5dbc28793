"""Permutations, partial permutations and the Ewens measure.

Every interface is 1-indexed: ``Permutation.images[k - 1]`` is ``sigma(k)``.
Exact computations take theta as a Fraction; the samplers also accept floats.
"""
import itertools
import math
from collections import Counter
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import NamedTuple, Union

import numpy as np

from permcumulants.base import CapacityError, ParameterError, StructureError

MAX_ENUMERATION_SIZE = 9

Theta = Union[Fraction, int]
RealTheta = Union[Fraction, int, float]


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``[N]`` in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(value) for value in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise StructureError(f"not a permutation in one-line notation: {list(images)}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_array(cls, values: Sequence[int] | np.ndarray, zero_based: bool = False) -> "Permutation":
        shift = 1 if zero_based else 0
        return cls(tuple(int(value) + shift for value in values))

    @property
    def size(self) -> int:
        return len(self.images)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def inverse(self) -> "Permutation":
        inverse = [0] * self.size
        for position, value in enumerate(self.images, start=1):
            inverse[value - 1] = position
        return Permutation(tuple(inverse))

    def cycles(self) -> list[tuple[int, ...]]:
        """Cycles, each starting at its minimum, by increasing minimum."""
        seen = [False] * (self.size + 1)
        result = []
        for start in range(1, self.size + 1):
            if seen[start]:
                continue
            cycle = []
            element = start
            while not seen[element]:
                seen[element] = True
                cycle.append(element)
                element = self(element)
            result.append(tuple(cycle))
        return result

    def cycle_notation(self) -> str:
        return "".join("(" + " ".join(map(str, cycle)) + ")" for cycle in self.cycles())

    def as_array(self) -> np.ndarray:
        """Images as a 1-indexed numpy array."""
        return np.asarray(self.images, dtype=np.int64)

    def to_json(self) -> list[int]:
        return list(self.images)

    def __str__(self) -> str:
        return ",".join(map(str, self.images))


PermutationLike = Union[Permutation, Sequence[int], np.ndarray]


def as_permutation(sigma: PermutationLike) -> Permutation:
    if isinstance(sigma, Permutation):
        return sigma
    return Permutation(tuple(int(value) for value in sigma))


@dataclass(frozen=True)
class PartialPermutation:
    """Injective partial map ``sources[j] -> targets[j]``."""

    sources: tuple[int, ...]
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        sources = tuple(int(value) for value in self.sources)
        targets = tuple(int(value) for value in self.targets)
        if len(sources) != len(targets):
            raise StructureError("sources and targets have different lengths")
        if len(set(sources)) != len(sources):
            raise StructureError(f"repeated source in {list(sources)}")
        if len(set(targets)) != len(targets):
            raise StructureError(f"repeated target in {list(targets)}")
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return len(self.sources)


def partial_cycle_count(partial: PartialPermutation) -> int:
    """Number of closed orbits of a partial permutation."""
    mapping = dict(zip(partial.sources, partial.targets))
    visited: set[int] = set()
    cycles = 0
    for start in partial.sources:
        if start in visited:
            continue
        element = start
        path = []
        while element in mapping and element not in visited:
            visited.add(element)
            path.append(element)
            element = mapping[element]
        if element == start and path:
            cycles += 1
    return cycles


class CycleStats(NamedTuple):
    total: int
    by_length: dict[int, int]


def cycle_stats(sigma: PermutationLike) -> CycleStats:
    """Total number of cycles and the number of cycles of each length."""
    lengths = Counter(len(cycle) for cycle in as_permutation(sigma).cycles())
    return CycleStats(sum(lengths.values()), dict(sorted(lengths.items())))


def parse_theta(value: Union[str, RealTheta]) -> Fraction:
    """Exact theta from ``"1/2"``, ``"2"``, ``"0.5"``, an int or a Fraction."""
    if isinstance(value, float):
        raise ParameterError("exact computations need a rational theta, not a float")
    try:
        theta = Fraction(value)
    except (ValueError, ZeroDivisionError, InvalidOperation) as e:
        raise ParameterError(f"cannot read theta from {value!r}") from e
    if theta <= 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    return theta


def parse_real_theta(value: Union[str, RealTheta]) -> float:
    """Theta for Monte-Carlo paths; accepts the exact forms too."""
    if isinstance(value, str) and "/" in value:
        theta = float(parse_theta(value))
    else:
        try:
            theta = float(Decimal(str(value)))
        except InvalidOperation as e:
            raise ParameterError(f"cannot read theta from {value!r}") from e
    if not math.isfinite(theta) or theta <= 0:
        raise ParameterError(f"theta must be positive, got {value}")
    return theta


def rising_factorial(theta: Theta, n: int) -> Fraction:
    """``theta (theta + 1) ... (theta + n - 1)``."""
    result = Fraction(1)
    for k in range(n):
        result *= theta + k
    return result


def ewens_weight(sigma: PermutationLike, theta: Union[str, Theta]) -> Fraction:
    """Exact Ewens probability ``theta ** cycles / rising_factorial(theta, N)``."""
    theta = parse_theta(theta)
    sigma = as_permutation(sigma)
    return theta ** cycle_stats(sigma).total / rising_factorial(theta, sigma.size)


def enumerate_ewens(n: int, theta: Union[str, Theta]) -> Iterator[tuple[Permutation, Fraction]]:
    """Every permutation of size ``n`` with its exact Ewens weight.

    Raises:
        CapacityError: unless ``1 <= n <= 9``.
    """
    if not 1 <= n <= MAX_ENUMERATION_SIZE:
        raise CapacityError(f"enumeration needs 1 <= N <= {MAX_ENUMERATION_SIZE}, got {n}")
    theta = parse_theta(theta)
    powers = [theta**cycles for cycles in range(n + 1)]
    normaliser = rising_factorial(theta, n)
    for images in itertools.permutations(range(1, n + 1)):
        sigma = Permutation(images)
        yield sigma, powers[cycle_stats(sigma).total] / normaliser


def ewens_sample_batch(
    n: int,
    theta: RealTheta,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """``size`` independent Ewens permutations of ``[n]``, one per row.

    Grows every permutation one element at a time: element ``k`` becomes a
    fixed point with probability ``theta / (k + theta - 1)`` and is otherwise
    inserted in a cycle just before a uniformly chosen existing element.

    Returns:
        An int array of shape ``(size, n)`` holding 1-indexed images.
    """
    if n < 1:
        raise ParameterError(f"N must be at least 1, got {n}")
    if size < 0:
        raise ParameterError(f"sample count must be non-negative, got {size}")
    theta = parse_real_theta(theta)
    sigma = np.empty((size, n), dtype=np.int64)
    inverse = np.empty((size, n), dtype=np.int64)
    rows = np.arange(size)
    for k in range(n):
        # 0-based: element k joins a permutation of {0, ..., k-1}
        uniforms = rng.random(size)
        targets = rng.integers(0, max(k, 1), size=size)
        sigma[:, k] = k
        inverse[:, k] = k
        inserted = rows[uniforms * (k + theta) >= theta]
        if inserted.size:
            chosen = targets[inserted]
            predecessors = inverse[inserted, chosen]
            sigma[inserted, predecessors] = k
            sigma[inserted, k] = chosen
            inverse[inserted, k] = predecessors
            inverse[inserted, chosen] = k
    return sigma + 1


def ewens_sample(n: int, theta: RealTheta, rng: np.random.Generator) -> Permutation:
    """One Ewens permutation of ``[n]``; linear time and space."""
    return Permutation.from_array(ewens_sample_batch(n, theta, 1, rng)[0])


def exact_distribution(
    statistic: Callable[[Permutation], int | Fraction],
    n: int,
    theta: Union[str, Theta],
) -> dict[int | Fraction, Fraction]:
    """Exact law of ``statistic`` under the Ewens measure on ``S_n``."""
    law: dict[int | Fraction, Fraction] = {}
    for sigma, weight in enumerate_ewens(n, theta):
        value = statistic(sigma)
        law[value] = law.get(value, Fraction(0)) + weight
    return dict(sorted(law.items()))


def exact_moments(
    statistic: Callable[[Permutation], int | Fraction],
    n: int,
    theta: Union[str, Theta],
    orders: Iterable[int] = (1, 2),
) -> dict[int, Fraction]:
    """Exact raw moments ``E[statistic ** k]`` for each requested order."""
    law = exact_distribution(statistic, n, theta)
    return {
        order: sum((weight * Fraction(value) ** order for value, weight in law.items()), Fraction(0))
        for order in orders
    }


def exact_variance(
    statistic: Callable[[Permutation], int | Fraction],
    n: int,
    theta: Union[str, Theta],
) -> Fraction:
    moments = exact_moments(statistic, n, theta, (1, 2))
    return moments[2] - moments[1] ** 2
