"""Exclusion process on a line and its permutation description.

Sites ``1..N`` are either empty (0) or occupied (1). Particles enter at the
left at rate 1, hop between neighbouring sites at rate 1 and leave at the
right at rate ``beta``. With ``beta = 1 / theta`` the steady state is the law
of the exceedance word of an Ewens permutation of size ``N + 1``.
"""
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from permcumulants.base import CapacityError, ParameterError, StructureError
from permcumulants.permutation import (
    MAX_ENUMERATION_SIZE,
    Permutation,
    PermutationLike,
    RealTheta,
    Theta,
    as_permutation,
    enumerate_ewens,
    ewens_sample_batch,
)
from permcumulants.utils import logger


@dataclass(frozen=True)
class BinaryWord:
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(bit) for bit in self.bits)
        if any(bit not in (0, 1) for bit in bits):
            raise StructureError(f"a word has 0/1 entries, got {list(bits)}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "BinaryWord":
        text = text.strip()
        if any(character not in "01" for character in text):
            raise StructureError(f"a word is a string of 0 and 1, got {text!r}")
        return cls(tuple(int(character) for character in text))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def to_json(self) -> str:
        return str(self)


@dataclass(frozen=True)
class Shape:
    """Young diagram given by weakly decreasing row lengths; empty rows allowed."""

    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        rows = tuple(int(row) for row in self.rows)
        if not rows:
            raise StructureError("a shape has at least one row")
        if any(row < 0 for row in rows) or any(a < b for a, b in zip(rows, rows[1:])):
            raise StructureError(f"row lengths must be weakly decreasing and nonnegative, got {list(rows)}")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        """Number of rows plus number of columns."""
        return len(self.rows) + self.rows[0]

    def to_json(self) -> list[int]:
        return list(self.rows)


def psi(sigma: PermutationLike) -> Permutation:
    """Write every cycle ending with its minimum, minima increasing, and concatenate."""
    sigma = as_permutation(sigma)
    word: list[int] = []
    for cycle in sigma.cycles():
        # cycles() starts at the minimum; rotate it to the end
        word.extend(cycle[1:])
        word.append(cycle[0])
    return Permutation(tuple(word))


def _right_to_left_minima_positions(images: Sequence[int]) -> list[int]:
    positions = []
    lowest = len(images) + 1
    for position in range(len(images) - 1, -1, -1):
        if images[position] < lowest:
            lowest = images[position]
            positions.append(position)
    return positions[::-1]


def psi_inverse(word: PermutationLike) -> Permutation:
    """Cut after every right-to-left minimum and read each piece as a cycle."""
    images = as_permutation(word).images
    sigma = [0] * len(images)
    start = 0
    for end in _right_to_left_minima_positions(images):
        cycle = images[start:end + 1]
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            sigma[a - 1] = b
        start = end + 1
    return Permutation(tuple(sigma))


def right_to_left_minima(sigma: PermutationLike) -> int:
    """Number of positions whose value is below every value to its right."""
    return len(_right_to_left_minima_positions(as_permutation(sigma).images))


def exceedance_word(sigma: PermutationLike) -> BinaryWord:
    """``(sigma(2) >= 2, ..., sigma(N + 1) >= N + 1)`` for ``sigma`` of size ``N + 1``."""
    images = as_permutation(sigma).images
    return BinaryWord(tuple(int(images[k] >= k + 1) for k in range(1, len(images))))


def ascent_word(word: PermutationLike) -> BinaryWord:
    """Bit ``k`` is 1 when the value ``k + 1`` sits at an ascent; the last position counts as one."""
    images = as_permutation(word).images
    position_of = {value: position for position, value in enumerate(images)}
    last = len(images) - 1
    bits = []
    for value in range(2, len(images) + 1):
        position = position_of[value]
        bits.append(int(position == last or images[position + 1] > value))
    return BinaryWord(tuple(bits))


def shape_to_word(shape: Union[Shape, Sequence[int]]) -> BinaryWord:
    """Read the south-east border: 1 for every south step after the first, 0 for west steps."""
    rows = shape.rows if isinstance(shape, Shape) else Shape(tuple(shape)).rows
    bits: list[int] = []
    for k in range(1, len(rows)):
        bits.extend([0] * (rows[k - 1] - rows[k]))
        bits.append(1)
    bits.extend([0] * rows[-1])
    return BinaryWord(tuple(bits))


def word_to_shape(word: Union[BinaryWord, str]) -> Shape:
    if isinstance(word, str):
        word = BinaryWord.from_string(word)
    width = word.bits.count(0)
    rows = [width]
    for bit in word.bits:
        if bit:
            rows.append(width)
        else:
            width -= 1
    return Shape(tuple(rows))


def exact_word_law(n: int, theta: Union[str, Theta]) -> dict[str, Fraction]:
    """Law of the exceedance word of an Ewens permutation of size ``n + 1``, by enumeration."""
    if not 1 <= n <= MAX_ENUMERATION_SIZE - 1:
        raise CapacityError(f"exact word laws need 1 <= N <= {MAX_ENUMERATION_SIZE - 1}, got {n}")
    law: dict[str, Fraction] = {}
    for sigma, weight in enumerate_ewens(n + 1, theta):
        word = str(exceedance_word(sigma))
        law[word] = law.get(word, Fraction(0)) + weight
    return dict(sorted(law.items()))


def ssep_steady_batch(
    n: int,
    theta: RealTheta,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Steady-state configurations, one per row, shape ``(size, n)``."""
    samples = ewens_sample_batch(n + 1, theta, size, rng)
    return (samples[:, 1:] >= np.arange(2, n + 2)).astype(np.int8)


def ssep_steady_sample(n: int, theta: RealTheta, rng: np.random.Generator) -> BinaryWord:
    return BinaryWord(tuple(ssep_steady_batch(n, theta, 1, rng)[0].tolist()))


def _check_rates(beta: float, rate_scale: float) -> None:
    if not 0 < rate_scale <= 1:
        raise ParameterError(f"rate_scale must lie in (0, 1], got {rate_scale}")
    if not beta > 0 or not beta * rate_scale < 1:
        raise ParameterError(
            f"need 0 < beta and beta * rate_scale < 1, got beta={beta}, rate_scale={rate_scale}"
        )


def _initial_states(n: int, chains: int, initial: Optional[Union[BinaryWord, str]]) -> np.ndarray:
    if initial is None:
        return np.zeros((chains, n), dtype=np.int8)
    if isinstance(initial, str):
        initial = BinaryWord.from_string(initial)
    if len(initial) != n:
        raise StructureError(f"initial word has length {len(initial)}, expected {n}")
    return np.tile(np.array(initial.bits, dtype=np.int8), (chains, 1))


def _advance(
    states: np.ndarray,
    beta: float,
    steps: int,
    rng: np.random.Generator,
    rate_scale: float,
) -> None:
    """Apply ``steps`` transitions to every row of ``states`` in place."""
    chains, n = states.shape
    rows = np.arange(chains)
    for _ in range(steps):
        # slot 0 is the left boundary, slot k the bond (k, k + 1), slot n the right boundary
        slots = rng.integers(0, n + 1, size=chains)
        uniforms = rng.random(chains)
        enter = (slots == 0) & (states[:, 0] == 0) & (uniforms < rate_scale)
        leave = (slots == n) & (states[:, n - 1] == 1) & (uniforms < rate_scale * beta)
        states[enter, 0] = 1
        states[leave, n - 1] = 0
        if n > 1:
            left = np.clip(slots - 1, 0, n - 2)
            hop = (
                (slots >= 1)
                & (slots <= n - 1)
                & (uniforms < rate_scale)
                & (states[rows, left] != states[rows, left + 1])
            )
            chosen = rows[hop]
            swapped = states[chosen, left[hop]].copy()
            states[chosen, left[hop]] = states[chosen, left[hop] + 1]
            states[chosen, left[hop] + 1] = swapped


def ssep_mcmc(
    n: int,
    beta: float,
    steps: int,
    rng: np.random.Generator,
    initial: Optional[Union[BinaryWord, str]] = None,
    rate_scale: float = 1.0,
) -> BinaryWord:
    """State of one chain after ``steps`` transitions.

    Each transition picks the left boundary, one of the ``N - 1`` bonds or the
    right boundary uniformly and fires it with probability ``rate_scale``
    (``rate_scale * beta`` for an exit); otherwise nothing happens.

    Raises:
        ParameterError: unless ``beta > 0``, ``0 < rate_scale <= 1`` and ``beta * rate_scale < 1``.
    """
    if n < 1:
        raise ParameterError(f"the line needs at least one site, got {n}")
    if steps < 0:
        raise ParameterError(f"steps must be non-negative, got {steps}")
    _check_rates(beta, rate_scale)
    states = _initial_states(n, 1, initial)
    _advance(states, beta, steps, rng, rate_scale)
    return BinaryWord(tuple(states[0].tolist()))


def ssep_mcmc_law(
    n: int,
    beta: float,
    rng: np.random.Generator,
    burn_in: int = 500,
    retained: int = 10000,
    thin: int = 20,
    initial: Optional[Union[BinaryWord, str]] = None,
    rate_scale: float = 1.0,
    chains: int = 500,
) -> dict[str, float]:
    """Empirical law of retained states from ``chains`` chains run side by side.

    Every chain runs ``burn_in`` transitions, then keeps its state every
    ``thin`` transitions until ``retained`` states are kept in total.
    """
    if n < 1:
        raise ParameterError(f"the line needs at least one site, got {n}")
    if min(retained, thin, chains) < 1 or burn_in < 0:
        raise ParameterError("retained, thin and chains must be positive, burn_in non-negative")
    _check_rates(beta, rate_scale)
    chains = min(chains, retained)
    states = _initial_states(n, chains, initial)
    _advance(states, beta, burn_in, rng, rate_scale)
    counts: Counter[str] = Counter()
    kept = 0
    rounds = 0
    while kept < retained:
        _advance(states, beta, thin, rng, rate_scale)
        take = min(chains, retained - kept)
        counts.update("".join(map(str, row)) for row in states[:take].tolist())
        kept += take
        rounds += 1
    logger.debug("Kept %d states from %d chains over %d rounds.", kept, chains, rounds)
    return {word: count / kept for word, count in sorted(counts.items())}


def empirical_law(words: np.ndarray) -> dict[str, float]:
    """Relative frequency of each row of a 0/1 array."""
    counts = Counter("".join(map(str, row)) for row in np.asarray(words).tolist())
    total = sum(counts.values())
    return {word: count / total for word, count in sorted(counts.items())}


def tv_distance(
    p: Mapping[str, Union[float, Fraction]],
    q: Mapping[str, Union[float, Fraction]],
) -> Union[float, Fraction]:
    """Total variation distance between two finite laws."""
    keys: Iterable[str] = set(p) | set(q)
    return sum((abs(p.get(key, 0) - q.get(key, 0)) for key in keys), 0) / 2
