"""Finite simple graphs, potentials and well sets."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AdjacentWells,
    DuplicateEdge,
    DuplicateVertex,
    NegativePotential,
    SelfLoop,
    UnknownEndpoint,
    UnknownVertex,
    ValidationError,
)

INF = math.inf


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on string labels.

    The position of a label in ``vertices`` is its row/column index in every
    matrix built from the graph.
    """

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]
    adjacency: Mapping[str, tuple[str, ...]] = field(repr=False)
    index: Mapping[str, int] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def degree(self, x: str) -> int:
        return len(self.neighbors(x))

    def degrees(self) -> list[int]:
        return [len(self.adjacency[x]) for x in self.vertices]

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def neighbors(self, x: str) -> tuple[str, ...]:
        try:
            return self.adjacency[x]
        except KeyError:
            raise UnknownVertex(f"UnknownVertex: {x!r}") from None

    def idx(self, x: str) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise UnknownVertex(f"UnknownVertex: {x!r}") from None

    def has_edge(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self.edges

    def edge_list(self) -> list[tuple[str, str]]:
        """Edges as index-ordered pairs, sorted."""
        out = []
        for e in self.edges:
            u, v = sorted(e, key=self.index.__getitem__)
            out.append((u, v))
        out.sort(key=lambda p: (self.index[p[0]], self.index[p[1]]))
        return out

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edge_list():
            i, j = self.index[u], self.index[v]
            a[i, j] = a[j, i] = 1.0
        return a


def build_graph(vertices: Sequence[str], edges: Iterable[Sequence[str]]) -> Graph:
    """Validate vertex and edge lists and return a :class:`Graph`.

    Raises ``DuplicateVertex``, ``SelfLoop``, ``UnknownEndpoint`` or
    ``DuplicateEdge``.
    """
    verts = tuple(str(v) for v in vertices)
    index: dict[str, int] = {}
    for i, v in enumerate(verts):
        if v in index:
            raise DuplicateVertex(f"DuplicateVertex: {v!r}")
        index[v] = i

    edge_set: set[frozenset[str]] = set()
    nbrs: dict[str, list[str]] = {v: [] for v in verts}
    for pair in edges:
        if len(pair) != 2:
            raise ValidationError(f"edge must have two endpoints, got {pair!r}")
        u, v = str(pair[0]), str(pair[1])
        if u == v:
            raise SelfLoop(f"SelfLoop: ({u}, {v})")
        for w in (u, v):
            if w not in index:
                raise UnknownEndpoint(f"UnknownEndpoint: {w!r} in edge ({u}, {v})")
        e = frozenset((u, v))
        if e in edge_set:
            raise DuplicateEdge(f"DuplicateEdge: ({u}, {v})")
        edge_set.add(e)
        nbrs[u].append(v)
        nbrs[v].append(u)

    adjacency = {v: tuple(sorted(nb, key=index.__getitem__)) for v, nb in nbrs.items()}
    return Graph(verts, frozenset(edge_set), adjacency, index)


def bfs_distances(g: Graph, source: str) -> dict[str, float]:
    """Combinatorial distance from ``source`` to every vertex (``inf`` if unreachable)."""
    g.idx(source)
    dist = {v: INF for v in g.vertices}
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if dist[y] == INF:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def bfs_distance(g: Graph, x: str, y: str) -> float:
    g.idx(y)
    return bfs_distances(g, x)[y]


@dataclass(frozen=True)
class Potential:
    values: Mapping[str, float]

    def __post_init__(self):
        for x, val in self.values.items():
            if not math.isfinite(val):
                raise ValidationError(f"potential must be finite, V({x}) = {val!r}")
            if val < 0.0:
                raise NegativePotential(f"NegativePotential: V({x}) = {val!r}")

    def __getitem__(self, x: str) -> float:
        return self.values[x]

    def as_array(self, g: Graph) -> np.ndarray:
        return np.array([self.values[x] for x in g.vertices], dtype=float)

    def is_simple(self) -> bool:
        return all(val in (0.0, 1.0) for val in self.values.values())


def make_potential(g: Graph, values: Mapping[str, float] | Sequence[float]) -> Potential:
    """Potential from a mapping or a sequence in vertex order."""
    if isinstance(values, Mapping):
        missing = [x for x in g.vertices if x not in values]
        if missing:
            raise ValidationError(f"potential missing for vertices {missing}")
        extra = [x for x in values if x not in g.index]
        if extra:
            raise UnknownVertex(f"UnknownVertex: {extra[0]!r} in potential")
        vals = {x: float(values[x]) for x in g.vertices}
    else:
        if len(values) != g.n:
            raise ValidationError(f"potential has {len(values)} entries for {g.n} vertices")
        vals = {x: float(val) for x, val in zip(g.vertices, values)}
    return Potential(vals)


@dataclass(frozen=True)
class WellSet:
    wells: tuple[str, ...]
    pairwise_distances: np.ndarray = field(repr=False)
    S0: float | None

    @property
    def N(self) -> int:
        return len(self.wells)

    def __contains__(self, x) -> bool:
        return x in self.wells

    def others(self, j: str) -> tuple[str, ...]:
        return tuple(w for w in self.wells if w != j)


def detect_wells(g: Graph, v: Potential) -> WellSet:
    """Collect the zero set of ``v`` and check that no edge joins two wells.

    ``S0`` is ``None`` when fewer than two wells exist or when no two wells
    are mutually reachable.
    """
    for x in g.vertices:
        if x not in v.values:
            raise ValidationError(f"potential missing for vertex {x!r}")
        if v.values[x] < 0:
            raise NegativePotential(f"NegativePotential: V({x}) = {v.values[x]!r}")
    wells = tuple(x for x in g.vertices if v.values[x] == 0.0)
    wellset = set(wells)
    for u, w in g.edge_list():
        if u in wellset and w in wellset:
            raise AdjacentWells(u, w)

    n = len(wells)
    dmat = np.full((n, n), INF)
    for a, i in enumerate(wells):
        dist = bfs_distances(g, i)
        for b, j in enumerate(wells):
            dmat[a, b] = dist[j]
    off = [dmat[a, b] for a in range(n) for b in range(n) if a != b]
    s0 = min(off, default=INF)
    return WellSet(wells, dmat, None if s0 == INF else int(s0))
