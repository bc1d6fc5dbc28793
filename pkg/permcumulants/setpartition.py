"""Set partitions, the partition lattice and the moment/cumulant calculus."""
import itertools
import math
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Generic, Optional, TypeVar

from permcumulants.base import (
    CapacityError,
    MissingMomentError,
    ParameterError,
    StructureError,
    ZeroMomentError,
)

MAX_PARTITION_SIZE = 12
MAX_CUMULANT_ORDER = 10

V = TypeVar("V")


class DisjointSet:
    """Union-find over hashable labels with path compression and union by size."""

    def __init__(self, elements: Iterable[Hashable] = ()):
        self._parent: dict[Hashable, Hashable] = {}
        self._size: dict[Hashable, int] = {}
        for element in elements:
            self.add(element)

    def add(self, element: Hashable) -> None:
        if element not in self._parent:
            self._parent[element] = element
            self._size[element] = 1

    def __len__(self) -> int:
        """Number of classes."""
        return len(self._size)

    def __contains__(self, element: object) -> bool:
        return element in self._parent

    def find(self, element: Hashable) -> Hashable:
        root = element
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[element] != root:
            self._parent[element], element = root, self._parent[element]
        return root

    def unite(self, first: Hashable, second: Hashable) -> bool:
        """Merge the classes of ``first`` and ``second``; False if already merged."""
        root_a, root_b = self.find(first), self.find(second)
        if root_a == root_b:
            return False
        if self._size[root_a] < self._size[root_b]:
            root_a, root_b = root_b, root_a
        self._parent[root_b] = root_a
        self._size[root_a] += self._size.pop(root_b)
        return True

    def classes(self) -> list[list[Hashable]]:
        grouped: dict[Hashable, list[Hashable]] = {}
        for element in self._parent:
            grouped.setdefault(self.find(element), []).append(element)
        return list(grouped.values())


@dataclass(frozen=True, init=False)
class SetPartition:
    """A partition of a finite set of integers into nonempty blocks.

    Canonical form: each block is a sorted tuple and blocks are ordered by
    their minimum, so equal partitions compare and hash equal. The ground set
    is the union of the blocks; for partitions of ``[n]`` it is ``1..n``.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]):
        canonical = []
        seen: set[int] = set()
        for block in blocks:
            members = tuple(sorted(block))
            if not members:
                raise StructureError("set partition with an empty block")
            if seen.intersection(members) or len(set(members)) != len(members):
                raise StructureError(f"blocks are not disjoint at {list(members)}")
            seen.update(members)
            canonical.append(members)
        canonical.sort(key=lambda members: members[0])
        object.__setattr__(self, "blocks", tuple(canonical))

    @classmethod
    def singletons(cls, n: int) -> "SetPartition":
        return cls([k] for k in range(1, n + 1))

    @classmethod
    def top(cls, n: int) -> "SetPartition":
        return cls([range(1, n + 1)] if n else [])

    @classmethod
    def from_labels(cls, labels: Mapping[int, Hashable]) -> "SetPartition":
        """Partition whose blocks are the fibres of ``labels``."""
        grouped: dict[Hashable, list[int]] = {}
        for element, label in labels.items():
            grouped.setdefault(label, []).append(element)
        return cls(grouped.values())

    @property
    def ground(self) -> frozenset[int]:
        return frozenset(itertools.chain.from_iterable(self.blocks))

    @property
    def n(self) -> int:
        return sum(len(block) for block in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.blocks)

    @property
    def rank(self) -> int:
        return self.n - len(self.blocks)

    def block_of(self, element: int) -> tuple[int, ...]:
        for block in self.blocks:
            if element in block:
                return block
        raise StructureError(f"{element} is not in the ground set")

    def to_json(self) -> list[list[int]]:
        return [list(block) for block in self.blocks]

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, block)) + "}" for block in self.blocks)


def is_partition_of(pi: SetPartition, n: int) -> bool:
    return pi.ground == frozenset(range(1, n + 1))


def _check_same_ground(p1: SetPartition, p2: SetPartition) -> None:
    if p1.ground != p2.ground:
        raise StructureError(f"partitions {p1} and {p2} have different ground sets")


def all_partitions(n: int) -> Iterator[SetPartition]:
    """Every partition of ``[n]`` exactly once, by restricted growth strings.

    Raises:
        ParameterError: unless ``1 <= n <= 12``.
    """
    if not 1 <= n <= MAX_PARTITION_SIZE:
        raise ParameterError(f"n must be between 1 and {MAX_PARTITION_SIZE}, got {n}")
    growth = [0] * n
    maxima = [0] * n

    while True:
        blocks: list[list[int]] = [[] for _ in range(maxima[-1] + 1)]
        for element, label in enumerate(growth, start=1):
            blocks[label].append(element)
        yield SetPartition(blocks)
        # next restricted growth string
        position = n - 1
        while position > 0 and growth[position] > maxima[position - 1]:
            position -= 1
        if position == 0:
            return
        growth[position] += 1
        maxima[position] = max(maxima[position - 1], growth[position])
        for later in range(position + 1, n):
            growth[later] = 0
            maxima[later] = maxima[position]


def join(p1: SetPartition, p2: SetPartition) -> SetPartition:
    """Finest partition coarser than both."""
    _check_same_ground(p1, p2)
    classes = DisjointSet(sorted(p1.ground))
    for block in itertools.chain(p1.blocks, p2.blocks):
        for element in block[1:]:
            classes.unite(block[0], element)
    return SetPartition(classes.classes())  # type: ignore[arg-type]


def meet(p1: SetPartition, p2: SetPartition) -> SetPartition:
    """Coarsest partition finer than both: the nonempty blockwise intersections."""
    _check_same_ground(p1, p2)
    pieces = (set(a).intersection(b) for a in p1.blocks for b in p2.blocks)
    return SetPartition(piece for piece in pieces if piece)


def refines(p1: SetPartition, p2: SetPartition) -> bool:
    """True if every block of ``p1`` lies inside a block of ``p2``."""
    _check_same_ground(p1, p2)
    owner = {element: index for index, block in enumerate(p2.blocks) for element in block}
    return all(len({owner[element] for element in block}) == 1 for block in p1.blocks)


def mobius_to_top(pi: SetPartition) -> int:
    """Möbius value from ``pi`` to the one-block partition."""
    blocks = len(pi)
    return (-1) ** (blocks - 1) * math.factorial(blocks - 1)


class MomentFunctional(Generic[V]):
    """Joint moments indexed by subsets of ``[ell]``.

    Values may be Fractions or rational functions; anything closed under
    ``+``, ``-`` and ``*`` with integer coefficients works. The empty subset
    always evaluates to ``one``. Evaluations are cached.
    """

    def __init__(self, evaluate: Callable[[frozenset[int]], V], one: Any = 1):
        self._evaluate = evaluate
        self.one = one
        self._cache: dict[frozenset[int], V] = {}

    @classmethod
    def from_mapping(
        cls,
        values: Mapping[Iterable[int], V] | Mapping[frozenset[int], V],
        one: Any = 1,
    ) -> "MomentFunctional[V]":
        """Functional backed by an explicit table; missing subsets raise."""
        table = {frozenset(key): value for key, value in values.items()}

        def lookup(subset: frozenset[int]) -> V:
            if subset not in table:
                raise MissingMomentError(subset)
            return table[subset]

        return cls(lookup, one)

    @classmethod
    def product(cls, factors: Mapping[int, V], one: Any = 1) -> "MomentFunctional[V]":
        """Exactly factorising functional ``M(D) = prod of factors[j] for j in D``."""
        def multiply(subset: frozenset[int]) -> V:
            result = one
            for element in sorted(subset):
                result = result * factors[element]
            return result

        return cls(multiply, one)

    def __call__(self, subset: Iterable[int]) -> V:
        key = frozenset(subset)
        if not key:
            return self.one  # type: ignore[no-any-return]
        if key not in self._cache:
            self._cache[key] = self._evaluate(key)
        return self._cache[key]

    def block_product(self, pi: SetPartition) -> V:
        result = self.one
        for block in pi.blocks:
            result = result * self(block)
        return result  # type: ignore[no-any-return]


def _mobius_sum(moments: MomentFunctional[V], partitions: Iterable[SetPartition]) -> V:
    total = moments.one - moments.one
    for pi in partitions:
        total = total + mobius_to_top(pi) * moments.block_product(pi)
    return total  # type: ignore[no-any-return]


def cumulant_from_moments(moments: MomentFunctional[V], ell: int) -> V:
    """Joint cumulant of ``ell`` variables from their joint moments.

    Sums the Möbius value of every partition of ``[ell]`` times the product
    of the moments of its blocks.

    Raises:
        CapacityError: for ``ell > 10``.
    """
    if ell > MAX_CUMULANT_ORDER:
        raise CapacityError(f"cumulants are limited to order {MAX_CUMULANT_ORDER}, got {ell}")
    if ell == 1:
        return moments({1})
    return _mobius_sum(moments, all_partitions(ell))


def truncated_cumulant(
    moments: MomentFunctional[V],
    pi0: SetPartition,
    forbidden: Sequence[SetPartition] = (),
) -> V:
    """Möbius sum over partitions above ``pi0`` that lie below none of ``forbidden``."""
    ell = pi0.n
    if not is_partition_of(pi0, ell):
        raise StructureError(f"{pi0} is not a partition of [{ell}]")
    for other in forbidden:
        _check_same_ground(pi0, other)
    if ell > MAX_CUMULANT_ORDER:
        raise CapacityError(f"cumulants are limited to order {MAX_CUMULANT_ORDER}, got {ell}")
    selected = (
        pi
        for pi in all_partitions(ell)
        if refines(pi0, pi) and not any(refines(pi, other) for other in forbidden)
    )
    return _mobius_sum(moments, selected)


def _subsets(elements: Sequence[int]) -> Iterator[tuple[int, ...]]:
    return itertools.chain.from_iterable(
        itertools.combinations(elements, size) for size in range(len(elements) + 1)
    )


def quasi_factor_U(moments: MomentFunctional[V], delta: Iterable[int]) -> V:
    """The factor ``U_delta`` defined by ``prod over subsets d of delta of U_d = M_delta``.

    Boolean Möbius inversion gives ``U_delta = prod of M_d ** ((-1) ** (|delta| - |d|))``.

    Raises:
        ZeroMomentError: if a moment of a subset of ``delta`` is zero.
    """
    elements = tuple(sorted(set(delta)))
    numerator = moments.one
    denominator = moments.one
    for subset in _subsets(elements):
        value = moments(subset)
        if value == 0:
            raise ZeroMomentError(subset)
        if (len(elements) - len(subset)) % 2 == 0:
            numerator = numerator * value
        else:
            denominator = denominator * value
    if isinstance(numerator, int) and isinstance(denominator, int):
        return Fraction(numerator, denominator)  # type: ignore[return-value]
    return numerator / denominator  # type: ignore[no-any-return,operator]


def bell_number(n: int) -> int:
    """Number of partitions of ``[n]``, by the Bell triangle."""
    row = [1]
    for _ in range(n):
        next_row = [row[-1]]
        for value in row:
            next_row.append(next_row[-1] + value)
        row = next_row
    return row[0]


def exact_functional(values: Sequence[Sequence[Fraction]], weights: Sequence[Fraction]) -> MomentFunctional[Fraction]:
    """Joint moments of a finite random vector.

    Args:
        values: One row per outcome, one column per variable.
        weights: Probability of each outcome.
    """
    def moment(subset: frozenset[int]) -> Fraction:
        total = Fraction(0)
        for row, weight in zip(values, weights):
            term = Fraction(weight)
            for j in subset:
                term *= row[j - 1]
            total += term
        return total

    return MomentFunctional(moment, Fraction(1))


def parse_partition(data: Any, n: Optional[int] = None) -> SetPartition:
    """Partition from its JSON form, e.g. ``[[1,2],[3]]``; optionally check it covers ``[n]``."""
    try:
        pi = SetPartition([int(element) for element in block] for block in data)
    except TypeError as e:
        raise StructureError(f"not a list of blocks: {data!r}") from e
    if n is not None and not is_partition_of(pi, n):
        raise StructureError(f"{pi} is not a partition of [{n}]")
    return pi
