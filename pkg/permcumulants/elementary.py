"""Joint moments and cumulants of the elementary events ``sigma(i) = s``.

A product of events ``B[i_1, s_1] ... B[i_r, s_r]`` under Ewens measure has an
exact moment: zero when two pairs contradict each other, and otherwise
``theta ** c / ((N + theta - 1) ... (N + theta - r))`` where ``r`` counts the
distinct pairs and ``c`` the cycles of the partial permutation they form.
Cumulants of products grouped by a set partition follow from the Möbius sum
over the partition lattice, numerically or as rational functions of ``N``.
"""
import functools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Optional, Union

import numpy as np

from permcumulants.base import CapacityError, ParameterError, StructureError
from permcumulants.graphs import component_count, connected_components, g1_g2
from permcumulants.permutation import (
    PartialPermutation,
    Theta,
    enumerate_ewens,
    parse_theta,
    partial_cycle_count,
)
from permcumulants.ratfun import Degree, Poly, RatFun
from permcumulants.setpartition import (
    MomentFunctional,
    SetPartition,
    all_partitions,
    cumulant_from_moments,
    is_partition_of,
    join,
    parse_partition,
)
from permcumulants.utils import logger

MAX_TAU_BLOCKS = 8

Pair = tuple[int, int]


@dataclass(frozen=True)
class ElementarySpec:
    """Lists ``i`` and ``s`` of length ``r`` and a partition ``tau`` of ``[r]``."""

    i: tuple[int, ...]
    s: tuple[int, ...]
    tau: SetPartition

    def __post_init__(self) -> None:
        object.__setattr__(self, "i", tuple(int(value) for value in self.i))
        object.__setattr__(self, "s", tuple(int(value) for value in self.s))
        if len(self.i) != len(self.s):
            raise StructureError(f"i and s have different lengths {len(self.i)} and {len(self.s)}")
        if not self.i:
            raise StructureError("a spec needs at least one event")
        if any(value < 1 for value in self.i + self.s):
            raise StructureError("entries of i and s must be positive integers")
        if not is_partition_of(self.tau, self.r):
            raise StructureError(f"tau = {self.tau} is not a partition of [{self.r}]")

    @classmethod
    def singletons(cls, i: Sequence[int], s: Sequence[int]) -> "ElementarySpec":
        return cls(tuple(i), tuple(s), SetPartition.singletons(len(i)))

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ElementarySpec":
        try:
            i = tuple(int(value) for value in data["i"])
            s = tuple(int(value) for value in data["s"])
        except (KeyError, TypeError, ValueError) as e:
            raise StructureError(f"not an elementary spec: {data!r}") from e
        if data.get("tau") is None:
            return cls.singletons(i, s)
        return cls(i, s, parse_partition(data["tau"], len(i)))

    @property
    def r(self) -> int:
        return len(self.i)

    @property
    def pairs(self) -> tuple[Pair, ...]:
        return tuple(zip(self.i, self.s))

    def block_pairs(self, blocks: Sequence[int]) -> tuple[Pair, ...]:
        """Pairs of the events in the union of the given tau blocks."""
        return tuple(
            self.pairs[j - 1] for index in sorted(blocks) for j in self.tau.blocks[index - 1]
        )

    def to_json(self) -> dict:
        return {"i": list(self.i), "s": list(self.s), "tau": self.tau.to_json()}

    @property
    def sort_key(self) -> tuple:
        return (self.r, self.i, self.s, self.tau.blocks)


def merge_pairs(pairs: Sequence[Pair]) -> Optional[PartialPermutation]:
    """Deduplicate ``pairs``; ``None`` when two of them cannot hold together."""
    distinct = sorted(set((int(a), int(b)) for a, b in pairs))
    sources = [a for a, _ in distinct]
    targets = [b for _, b in distinct]
    if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
        return None
    return PartialPermutation(tuple(sources), tuple(targets))


def _check_lists(i: Sequence[int], s: Sequence[int]) -> list[Pair]:
    if len(i) != len(s):
        raise StructureError(f"i and s have different lengths {len(i)} and {len(s)}")
    return [(int(a), int(b)) for a, b in zip(i, s)]


def joint_moment(
    i: Sequence[int],
    s: Sequence[int],
    theta: Union[str, Theta],
    n: int,
) -> Fraction:
    """Exact ``E[B[i_1, s_1] ... B[i_r, s_r]]`` on ``S_n``.

    Raises:
        ParameterError: if an entry lies outside ``[n]``.
    """
    theta = parse_theta(theta)
    pairs = _check_lists(i, s)
    for a, b in pairs:
        if not (1 <= a <= n and 1 <= b <= n):
            raise ParameterError(f"pair ({a}, {b}) is outside [{n}]")
    partial = merge_pairs(pairs)
    if partial is None:
        return Fraction(0)
    result = theta ** partial_cycle_count(partial)
    for k in range(1, len(partial) + 1):
        result /= n + theta - k
    return result


@functools.lru_cache(maxsize=65536)
def _symbolic_moment(pairs: tuple[Pair, ...], theta: Fraction) -> RatFun:
    partial = merge_pairs(pairs)
    if partial is None:
        return RatFun.zero()
    denominator = Poly.constant(1)
    for k in range(1, len(partial) + 1):
        denominator = denominator * Poly.from_coefficients([theta - k, 1])
    return RatFun(Poly.constant(theta ** partial_cycle_count(partial)), denominator)


def joint_moment_symbolic(
    i: Sequence[int],
    s: Sequence[int],
    theta: Union[str, Theta],
) -> RatFun:
    """``joint_moment`` as a rational function of ``N``, valid for ``N >= max(i + s)``."""
    pairs = tuple(sorted(set(_check_lists(i, s))))
    return _symbolic_moment(pairs, parse_theta(theta))


def _check_blocks(spec: ElementarySpec) -> int:
    blocks = len(spec.tau)
    if blocks > MAX_TAU_BLOCKS:
        raise CapacityError(f"tau may have at most {MAX_TAU_BLOCKS} blocks, got {blocks}")
    return blocks


def joint_cumulant(spec: ElementarySpec, theta: Union[str, Theta], n: int) -> Fraction:
    """Exact joint cumulant of the tau-grouped products of events on ``S_n``."""
    theta = parse_theta(theta)
    ell = _check_blocks(spec)

    def moment(subset: frozenset[int]) -> Fraction:
        pairs = spec.block_pairs(sorted(subset))
        return joint_moment([a for a, _ in pairs], [b for _, b in pairs], theta, n)

    return cumulant_from_moments(MomentFunctional(moment, Fraction(1)), ell)


def joint_cumulant_symbolic(spec: ElementarySpec, theta: Union[str, Theta]) -> RatFun:
    """``joint_cumulant`` as a rational function of ``N``."""
    theta = parse_theta(theta)
    ell = _check_blocks(spec)

    def moment(subset: frozenset[int]) -> RatFun:
        pairs = tuple(sorted(set(spec.block_pairs(sorted(subset)))))
        return _symbolic_moment(pairs, theta)

    return cumulant_from_moments(MomentFunctional(moment, RatFun.one()), ell)


def bound_exponent(spec: ElementarySpec) -> int:
    """Decay exponent ``-#Conn(G1) - #(Conn(G2) v tau) + 1`` of the joint cumulant."""
    g1, g2 = g1_g2(spec.i, spec.s)
    return -component_count(g1) - len(join(connected_components(g2), spec.tau)) + 1


def distinct_value_bound(spec: ElementarySpec) -> int:
    """The weaker exponent ``-|{i} ∪ {s}| + 1``."""
    return -len(set(spec.i) | set(spec.s)) + 1


@dataclass(frozen=True)
class BoundReport:
    spec: ElementarySpec
    theta: Fraction
    cumulant: RatFun
    degree: Degree
    bound: int
    holds: bool

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "theta": self.theta,
            "cumulant": self.cumulant.to_json(),
            "ratfun": self.cumulant.pretty(),
            "degree": self.degree,
            "bound": self.bound,
            "holds": self.holds,
        }


def verify_main_lemma(spec: ElementarySpec, theta: Union[str, Theta]) -> BoundReport:
    """Check that the exact degree in ``N`` of the cumulant respects ``bound_exponent``."""
    theta = parse_theta(theta)
    cumulant = joint_cumulant_symbolic(spec, theta)
    bound = bound_exponent(spec)
    return BoundReport(spec, theta, cumulant, cumulant.degree, bound, cumulant.degree <= bound)


def _restricted_growth(length: int, symbols: int) -> Iterator[list[int]]:
    """Labellings of ``length`` slots by ``1..symbols`` up to renaming, first use in order."""
    def extend(prefix: list[int], used: int) -> Iterator[list[int]]:
        if len(prefix) == length:
            yield prefix
            return
        for label in range(1, min(used + 1, symbols) + 1):
            yield from extend(prefix + [label], max(used, label))

    yield from extend([], 0)


def collision_specs(max_r: int, alphabet: int = 6) -> Iterator[ElementarySpec]:
    """Every collision pattern of ``(i, s)`` with ``r <= max_r`` and every tau."""
    if max_r < 1 or alphabet < 1:
        raise ParameterError("max_r and alphabet must be positive")
    for r in range(1, max_r + 1):
        taus = list(all_partitions(r))
        for labels in _restricted_growth(2 * r, alphabet):
            for tau in taus:
                yield ElementarySpec(tuple(labels[:r]), tuple(labels[r:]), tau)


def random_specs(
    r: int,
    count: int,
    alphabet: int,
    rng: np.random.Generator,
) -> list[ElementarySpec]:
    """``count`` specs with uniform entries in ``1..alphabet`` and a uniform labelling for tau."""
    specs = []
    for _ in range(count):
        values = rng.integers(1, alphabet + 1, size=2 * r)
        labels = rng.integers(0, r, size=r)
        tau = SetPartition.from_labels({j + 1: int(label) for j, label in enumerate(labels)})
        specs.append(ElementarySpec(tuple(values[:r].tolist()), tuple(values[r:].tolist()), tau))
    return specs


def sweep_main_lemma(
    specs: Sequence[ElementarySpec],
    thetas: Sequence[Union[str, Theta]],
) -> list[BoundReport]:
    """Run ``verify_main_lemma`` on every spec and theta, ordered by spec."""
    exact_thetas = [parse_theta(theta) for theta in thetas]
    ordered = sorted(set(specs), key=lambda spec: spec.sort_key)
    logger.info("Checking %d specs at theta in %s.", len(ordered), [str(t) for t in exact_thetas])
    reports = [verify_main_lemma(spec, theta) for spec in ordered for theta in exact_thetas]
    violations = [report for report in reports if not report.holds]
    if violations:
        logger.error("%d of %d checks break the degree bound.", len(violations), len(reports))
    else:
        logger.info("All %d checks respect the degree bound.", len(reports))
    return reports


def enumerated_moment(
    i: Sequence[int],
    s: Sequence[int],
    theta: Union[str, Theta],
    n: int,
) -> Fraction:
    """``joint_moment`` by summing Ewens weights over all of ``S_n``."""
    pairs = _check_lists(i, s)
    return sum(
        (
            weight
            for sigma, weight in enumerate_ewens(n, theta)
            if all(sigma(a) == b for a, b in pairs)
        ),
        Fraction(0),
    )
