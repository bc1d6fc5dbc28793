"""Simple graphs, their components, quotients and strong quotients.

Vertices are integers. Doubled graphs on ``W ⊔ W̄`` write the barred copy of
``w`` as ``-w``.
"""
import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from permcumulants.base import StructureError
from permcumulants.setpartition import DisjointSet, SetPartition

Edge = tuple[int, int]


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True, init=False)
class SimpleGraph:
    """Finite loopless graph without multiple edges."""

    vertices: tuple[int, ...]
    edges: frozenset[Edge]

    def __init__(self, vertices: Iterable[int], edges: Iterable[Sequence[int]] = ()):
        vertex_tuple = tuple(sorted(set(int(v) for v in vertices)))
        vertex_set = set(vertex_tuple)
        edge_set = set()
        for edge in edges:
            if len(edge) != 2:
                raise StructureError(f"an edge joins two vertices, got {list(edge)}")
            u, v = int(edge[0]), int(edge[1])
            if u == v:
                raise StructureError(f"loop at vertex {u}")
            if u not in vertex_set or v not in vertex_set:
                raise StructureError(f"edge {u}-{v} leaves the vertex set")
            edge_set.add(_edge(u, v))
        object.__setattr__(self, "vertices", vertex_tuple)
        object.__setattr__(self, "edges", frozenset(edge_set))

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SimpleGraph":
        """Graph from ``{"n": n, "edges": [[u, v], ...]}`` on ``1..n``.

        A ``"vertices"`` list may replace ``"n"`` (doubled graphs use it).
        """
        if "vertices" in data:
            vertices = [int(v) for v in data["vertices"]]
        else:
            vertices = list(range(1, int(data["n"]) + 1))
        return cls(vertices, data.get("edges", []))

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [list(edge) for edge in sorted(self.edges)],
        }

    def has_edge(self, u: int, v: int) -> bool:
        return _edge(u, v) in self.edges

    def relabel(self, mapping: Mapping[int, int]) -> "SimpleGraph":
        """Isomorphic copy under the injective vertex map ``mapping``."""
        return SimpleGraph(
            (mapping[v] for v in self.vertices),
            ((mapping[u], mapping[v]) for u, v in self.edges),
        )

    def induced(self, vertices: Iterable[int]) -> "SimpleGraph":
        keep = set(vertices)
        return SimpleGraph(keep, (e for e in self.edges if e[0] in keep and e[1] in keep))


def connected_components(graph: SimpleGraph) -> SetPartition:
    """Components of ``graph`` as a partition of its vertex set."""
    components = DisjointSet(graph.vertices)
    for u, v in graph.edges:
        components.unite(u, v)
    return SetPartition(components.classes())  # type: ignore[arg-type]


def component_count(graph: SimpleGraph) -> int:
    return len(connected_components(graph))


def _check_surjection(graph: SimpleGraph, f: Mapping[int, int]) -> tuple[int, ...]:
    missing = [v for v in graph.vertices if v not in f]
    if missing:
        raise StructureError(f"map is not defined on vertices {missing}")
    return tuple(sorted(set(f[v] for v in graph.vertices)))


def quotient(
    graph: SimpleGraph,
    f: Mapping[int, int],
    targets: Iterable[int] | None = None,
) -> SimpleGraph:
    """Contract ``graph`` along the fibers of ``f``.

    Args:
        graph: The graph to contract.
        f: A map defined on every vertex.
        targets: The codomain ``W``; defaults to the image of ``f``.

    Raises:
        StructureError: if ``f`` is not defined everywhere or misses a target.
    """
    image = _check_surjection(graph, f)
    if targets is not None:
        codomain = tuple(sorted(set(targets)))
        if set(image) != set(codomain):
            raise StructureError(f"map is not onto {list(codomain)}")
    return SimpleGraph(image, ((f[u], f[v]) for u, v in graph.edges if f[u] != f[v]))


def _doubled_ground(graph: SimpleGraph) -> tuple[int, ...]:
    positive = tuple(v for v in graph.vertices if v > 0)
    negative = sorted(-v for v in graph.vertices if v < 0)
    if 0 in graph.vertices or list(positive) != negative:
        raise StructureError("vertex set is not of the form W ⊔ W̄ with W̄ = -W")
    return positive


def strong_quotient(graph: SimpleGraph) -> SimpleGraph:
    """Graph on ``W`` keeping ``{w, w'}`` when both ``{w, w'}`` and ``{-w, -w'}`` are edges."""
    ground = _doubled_ground(graph)
    return SimpleGraph(
        ground,
        (
            (u, v)
            for u, v in itertools.combinations(ground, 2)
            if graph.has_edge(u, v) and graph.has_edge(-u, -v)
        ),
    )


def bar_forgetting(graph: SimpleGraph) -> dict[int, int]:
    """The map ``w̄ -> w``, ``w -> w`` on a doubled graph."""
    _doubled_ground(graph)
    return {v: abs(v) for v in graph.vertices}


def _check_lists(i: Sequence[int], s: Sequence[int]) -> int:
    if len(i) != len(s):
        raise StructureError(f"i and s have different lengths {len(i)} and {len(s)}")
    if not i:
        raise StructureError("i and s must not be empty")
    return len(i)


def g1_g2(i: Sequence[int], s: Sequence[int]) -> tuple[SimpleGraph, SimpleGraph]:
    """The equal-pair graph and the shared-symbol graph on ``[r]``."""
    r = _check_lists(i, s)
    vertices = range(1, r + 1)
    g1_edges = []
    g2_edges = []
    for j, h in itertools.combinations(vertices, 2):
        if i[j - 1] == i[h - 1] and s[j - 1] == s[h - 1]:
            g1_edges.append((j, h))
        if {i[j - 1], s[j - 1]} & {i[h - 1], s[h - 1]}:
            g2_edges.append((j, h))
    return SimpleGraph(vertices, g1_edges), SimpleGraph(vertices, g2_edges)


def doubled_graph(i: Sequence[int], s: Sequence[int]) -> SimpleGraph:
    """Graph on ``[r] ⊔ [r̄]`` joining entries of ``i`` (unbarred) and ``s`` (barred) with equal values."""
    r = _check_lists(i, s)
    labelled = [(j, i[j - 1]) for j in range(1, r + 1)] + [(-j, s[j - 1]) for j in range(1, r + 1)]
    edges = [(u, v) for (u, a), (v, b) in itertools.combinations(labelled, 2) if a == b]
    return SimpleGraph((vertex for vertex, _ in labelled), edges)


class ContractionCheck(NamedTuple):
    components: int
    quotient_components: int
    fiber_excess: int
    holds: bool

    def to_json(self) -> dict:
        return self._asdict()


def check_contraction_bound(graph: SimpleGraph, f: Mapping[int, int]) -> ContractionCheck:
    """Compare ``#Conn(G)`` with ``#Conn(G/f)`` plus the component excess of every fiber."""
    image = _check_surjection(graph, f)
    fibers: dict[int, list[int]] = {w: [] for w in image}
    for v in graph.vertices:
        fibers[f[v]].append(v)
    excess = sum(component_count(graph.induced(fiber)) - 1 for fiber in fibers.values())
    total = component_count(graph)
    contracted = component_count(quotient(graph, f))
    return ContractionCheck(total, contracted, excess, total <= contracted + excess)


class FiberTwoCheck(NamedTuple):
    components: int
    quotient_components: int
    strong_quotient_components: int
    holds: bool

    def to_json(self) -> dict:
        return self._asdict()


def check_fiber2_bound(graph: SimpleGraph) -> FiberTwoCheck:
    """Compare ``#Conn(G)`` with ``#Conn(G/f) + #Conn(G//f)`` on a doubled graph."""
    total = component_count(graph)
    weak = component_count(quotient(graph, bar_forgetting(graph)))
    strong = component_count(strong_quotient(graph))
    return FiberTwoCheck(total, weak, strong, total <= weak + strong)


def random_graph(
    vertices: Sequence[int],
    density: float,
    rng: np.random.Generator,
) -> SimpleGraph:
    """Erdős–Rényi graph on ``vertices`` with edge probability ``density``."""
    pairs = list(itertools.combinations(vertices, 2))
    keep = rng.random(len(pairs)) < density
    return SimpleGraph(vertices, (pair for pair, chosen in zip(pairs, keep) if chosen))


def random_map(
    vertices: Sequence[int],
    targets: int,
    rng: np.random.Generator,
) -> dict[int, int]:
    """Random surjection of ``vertices`` onto ``1..targets``."""
    if targets > len(vertices):
        raise StructureError("cannot map onto more targets than vertices")
    labels = np.concatenate(
        [np.arange(1, targets + 1), rng.integers(1, targets + 1, size=len(vertices) - targets)]
    )
    rng.shuffle(labels)
    return {v: int(label) for v, label in zip(vertices, labels)}


def lemma_report(
    checks: Iterable[ContractionCheck | FiberTwoCheck],
    describe: Callable[[int], Any] | None = None,
) -> dict:
    """Summary of a batch of checks: how many ran and which failed."""
    failures = []
    count = 0
    for index, check in enumerate(checks):
        count += 1
        if not check.holds:
            failures.append(describe(index) if describe else index)
    return {"instances": count, "violations": len(failures), "failures": failures}
