"""Walks with well-free interiors, their weights, and truncation bounds.

A path ``P = (x_0, ..., x_n)`` here is a walk: consecutive vertices are
adjacent and vertices may repeat. Interior vertices ``x_1..x_{n-1}`` must
not be wells. Paths have length ``n >= 1``.

Explicit enumeration is for inspection and counting; weighted sums are
accumulated length by length without materialising paths (see
:func:`walk_sums`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import NotAWell, PathLimitExceeded, PoleAtVertex, SeriesMayDiverge, ValidationError
from .graph_core import Graph, Potential, WellSet, INF

MAX_PATHS = 10**7


@dataclass(frozen=True)
class Path:
    vertices: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1])

    def __len__(self) -> int:
        return self.length


@dataclass(frozen=True)
class WeightParams:
    hbar: float
    lam: float = 0.0


@dataclass(frozen=True)
class LoopCounts:
    well: str
    counts: dict[int, int] = field(default_factory=dict)

    def __getitem__(self, k: int) -> int:
        return self.counts.get(k, 0)


def _well_mask(g: Graph, wells: WellSet) -> list[bool]:
    ws = set(wells.wells)
    return [x in ws for x in g.vertices]


def _distances_to(g: Graph, target: int, is_well: list[bool]) -> list[float]:
    """Steps needed to reach ``target`` moving only through non-wells."""
    nbrs = [[g.index[y] for y in g.adjacency[x]] for x in g.vertices]
    dist = [INF] * g.n
    dist[target] = 0
    frontier = [target]
    while frontier:
        nxt = []
        for y in frontier:
            for x in nbrs[y]:
                # x steps onto y; y must be the target or an allowed interior vertex
                if dist[x] == INF and (y == target or not is_well[y]):
                    dist[x] = dist[y] + 1
                    nxt.append(x)
        frontier = nxt
    return dist


def iter_paths(g: Graph, wells: WellSet, source: str, target: str, max_len: int) -> Iterator[Path]:
    """Yield paths ``source -> target`` of length ``1..max_len`` in
    lexicographic order of their vertex-index sequences."""
    if max_len < 0:
        raise ValidationError("max_len must be >= 0")
    s, t = g.idx(source), g.idx(target)
    is_well = _well_mask(g, wells)
    nbrs = [[g.index[y] for y in g.adjacency[x]] for x in g.vertices]
    reach = _distances_to(g, t, is_well)
    labels = g.vertices
    stack = [s]

    def rec(x: int, depth: int):
        if depth >= 1 and x == t:
            yield Path(tuple(labels[i] for i in stack))
        if depth == max_len or (depth >= 1 and is_well[x]):
            return
        for y in nbrs[x]:
            if depth + 1 + reach[y] > max_len:
                continue
            stack.append(y)
            yield from rec(y, depth + 1)
            stack.pop()

    yield from rec(s, 0)


def enumerate_paths(g: Graph, wells: WellSet, source: str, target: str, max_len: int,
                    limit: int = MAX_PATHS) -> list[Path]:
    out = []
    for p in iter_paths(g, wells, source, target, max_len):
        out.append(p)
        if len(out) > limit:
            raise PathLimitExceeded(f"PathLimitExceeded: more than {limit} paths")
    return out


def count_paths(g: Graph, wells: WellSet, source: str, target: str, max_len: int) -> list[int]:
    """Number of paths of each length ``0..max_len`` (index 0 is always 0)."""
    s, t = g.idx(source), g.idx(target)
    is_well = _well_mask(g, wells)
    nbrs = [[g.index[y] for y in g.adjacency[x]] for x in g.vertices]
    reach = _distances_to(g, t, is_well)
    counts = [0] * (max_len + 1)

    def rec(x: int, depth: int):
        if depth >= 1 and x == t:
            counts[depth] += 1
        if depth == max_len or (depth >= 1 and is_well[x]):
            return
        for y in nbrs[x]:
            if depth + 1 + reach[y] <= max_len:
                rec(y, depth + 1)

    rec(s, 0)
    return counts


def loop_counts(g: Graph, wells: WellSet, j: str, max_len: int) -> LoopCounts:
    """``N_j(k)`` for ``k = 0..max_len`` by exhaustive enumeration."""
    if j not in wells.wells:
        raise NotAWell(f"NotAWell: {j!r}")
    counts = count_paths(g, wells, j, j, max_len)
    return LoopCounts(j, dict(enumerate(counts)))


def vertex_factor(v: Potential, x: str, lam: float) -> float:
    """``a(x) = 1 / (V(x) - lam)``."""
    d = v[x] - lam
    if d == 0.0:
        raise PoleAtVertex(x, lam)
    return 1.0 / d


def path_weight(p: Path, v: Potential, w: WeightParams) -> float:
    """``s(P) = hbar^(2|P|) a(x_0) ... a(x_{|P|-1})``."""
    prod = 1.0
    for x in p.vertices[:-1]:
        prod *= vertex_factor(v, x, w.lam)
    return w.hbar ** (2 * p.length) * prod


def series_ratio(g: Graph, v: Potential, w: WeightParams) -> float:
    """``rho = hbar^2 * max_degree / min_{x not a well} |V(x) - lam|``."""
    gaps = [abs(v[x] - w.lam) for x in g.vertices if v[x] != 0.0]
    if not gaps or g.max_degree == 0:
        return 0.0
    m = min(gaps)
    if m == 0.0:
        return INF
    return w.hbar ** 2 * g.max_degree / m


def min_gap(g: Graph, v: Potential, lam: float) -> float:
    return min((abs(v[x] - lam) for x in g.vertices if v[x] != 0.0), default=INF)


def truncation_bound(g: Graph, w: WeightParams, v: Potential, K: int,
                     endpoint_factor: float = 1.0) -> float:
    """Bound on ``|sum_{k>K}|`` of a path-weight series.

    There are at most ``max_degree^k`` walks of length ``k`` from a vertex and
    each interior factor is at most ``1/min|V - lam|``, so the tail is bounded
    by ``endpoint_factor * rho^(K+1) / (1 - rho)``. For sums starting at a
    non-well ``endpoint_factor`` is 1.

    Raises :class:`SeriesMayDiverge` when ``rho >= 1``.
    """
    rho = series_ratio(g, v, w)
    if rho >= 1.0:
        raise SeriesMayDiverge(rho, w.hbar)
    if rho == 0.0:
        return 0.0
    return endpoint_factor * rho ** (K + 1) / (1.0 - rho)


def walk_sums(g: Graph, v: Potential, wells: WellSet, target: str, w: WeightParams,
              max_len: int) -> np.ndarray:
    """Truncated sums ``sum_{P: x -> target, |P| <= max_len} s(P)`` for every
    non-well ``x`` (zero at wells), accumulated length by length.

    The length-``k`` contributions obey ``t_1 = hbar^2 a * b`` and
    ``t_{k+1} = hbar^2 a * (A_int t_k)`` where ``b`` marks the neighbours of
    ``target`` and ``A_int`` is the adjacency among non-wells.
    """
    if target not in wells.wells:
        raise NotAWell(f"NotAWell: {target!r}")
    free = [x for x in g.vertices if x not in wells.wells]
    total = np.zeros(g.n)
    if not free or max_len < 1:
        return total
    pos = {x: i for i, x in enumerate(free)}
    a = np.array([vertex_factor(v, x, w.lam) for x in free])
    adj = np.zeros((len(free), len(free)))
    for x in free:
        for y in g.adjacency[x]:
            if y in pos:
                adj[pos[x], pos[y]] = 1.0
    b = np.array([1.0 if g.has_edge(x, target) else 0.0 for x in free])
    h2 = w.hbar ** 2

    term = h2 * a * b
    acc = term.copy()
    for _ in range(max_len - 1):
        term = h2 * a * (adj @ term)
        acc += term
    for x, i in pos.items():
        total[g.index[x]] = acc[i]
    return total


def loop_sum_expanded(g: Graph, v: Potential, wells: WellSet, j: str, w: WeightParams,
                      max_len: int) -> float:
    """``sum_{k=2}^{K} hbar^(2k) sum_{|P|=k} prod_{l=1}^{k-1} a(x_l)`` over loops at ``j``.

    This is the loop sum with the factor ``a(j)`` removed, so it is finite at
    ``lam = 0``.
    """
    if max_len < 2:
        return 0.0
    u = walk_sums(g, v, wells, j, w, max_len - 1)
    return w.hbar ** 2 * float(sum(u[g.index[y]] for y in g.adjacency[j]))
