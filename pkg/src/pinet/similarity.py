"""Collaborative similarity and path distances between users.

Structural similarity of an edge (a, b)::

    w_ab / (sum_c w_ac + sum_c w_bc - w_ab)

Contextual similarity is the weighted fraction of CPI attributes on which
the two users agree; the collaborative similarity blends both with ``alpha``.
The distance between two users is the product of reciprocal collaborative
similarities along the path that maximises the product of similarities; it
is found with Dijkstra over per-edge costs ``-ln(csim)``.
"""

from __future__ import annotations

import csv
import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MissingAttributes, NotDirectlyConnected, SameVertex
from .graph import PiNet

NEG_LOG = "neg-log"
RECIPROCAL_SUM = "reciprocal-sum"
PATH_COSTS = (NEG_LOG, RECIPROCAL_SUM)


@dataclass(frozen=True)
class SimilarityParams:
    alpha: float = 0.5
    attribute_weights: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)
    epsilon: float = 1e-12
    path_cost: str = NEG_LOG
    # Use 1/CSIM of the edge itself for adjacent pairs, even when a longer
    # path has a larger similarity product.
    direct_branch: bool = False
    # Adjacent pairs get DIST = CSIM instead of 1/CSIM (implies direct_branch).
    eq8_literal: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        w = tuple(float(x) for x in self.attribute_weights)
        if any(x < 0 for x in w) or sum(w) <= 0:
            raise ValueError("attribute weights must be non-negative with a positive sum")
        object.__setattr__(self, "attribute_weights", w)
        if self.path_cost not in PATH_COSTS:
            raise ValueError(f"unknown path cost {self.path_cost!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def structural_similarity(net: PiNet, a: int, b: int) -> float:
    if a == b:
        raise SameVertex(f"vertex {a} compared with itself")
    w = net.weight(a, b)
    if w == 0:
        raise NotDirectlyConnected(f"vertices {a} and {b} share no edge")
    return w / (net.strength(a) + net.strength(b) - w)


def contextual_similarity(net: PiNet, a: int, b: int, params: SimilarityParams) -> float:
    """Weighted share of attributes on which the two influential CPIs agree."""
    ca, cb = net.cpi(a), net.cpi(b)
    if ca is None or cb is None:
        raise MissingAttributes(f"vertex {a if ca is None else b} has no CPI")
    weights = params.attribute_weights
    if not len(ca) == len(cb) == len(weights):
        raise MissingAttributes(
            f"CPI lengths {len(ca)}/{len(cb)} do not match {len(weights)} attribute weights"
        )
    common = math.fsum(w for x, y, w in zip(ca, cb, weights) if x == y)
    return common / math.fsum(weights)


def collaborative_similarity(net: PiNet, a: int, b: int, params: SimilarityParams) -> float:
    s = structural_similarity(net, a, b)
    c = contextual_similarity(net, a, b, params)
    return params.alpha * s + (1.0 - params.alpha) * c


@dataclass
class DistanceMatrix:
    values: np.ndarray
    params: SimilarityParams | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, ij):
        return self.values[ij]

    def upper_entries(self):
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j, float(self.values[i, j])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i", "j", "distance"])
            for i, j, d in self.upper_entries():
                w.writerow([i, j, "inf" if math.isinf(d) else repr(d)])

    @classmethod
    def from_csv(cls, path: str | Path, n: int | None = None) -> "DistanceMatrix":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader, None)
            for i, j, d in reader:
                rows.append((int(i), int(j), float(d)))
        if n is None:
            n = 1 + max((j for _, j, _ in rows), default=0)
        values = np.zeros((n, n))
        for i, j, d in rows:
            values[i, j] = values[j, i] = d
        return cls(values)


def edge_similarities(net: PiNet, params: SimilarityParams) -> dict[tuple[int, int], float]:
    """CSIM for every edge, keyed by (low ID, high ID)."""
    return {(a, b): collaborative_similarity(net, a, b, params) for a, b, _ in net.edges()}


def _adjacency(net: PiNet, csim: dict[tuple[int, int], float], params: SimilarityParams):
    """Traversable edges as per-vertex lists of (neighbor, cost, 1/csim), sorted by neighbor."""
    adj: list[list[tuple[int, float, float]]] = [[] for _ in range(net.n)]
    for (a, b), s in csim.items():
        if s <= params.epsilon:
            continue
        cost = -math.log(s) if params.path_cost == NEG_LOG else 1.0 / s
        recip = 1.0 / s
        adj[a].append((b, cost, recip))
        adj[b].append((a, cost, recip))
    for lst in adj:
        lst.sort()
    return adj


def _dijkstra(adj, source: int):
    """Least-cost tree from ``source``.

    Returns (cost, pred, product) lists; ``product`` is the product of 1/csim
    along the selected path. At equal tentative cost the smaller predecessor ID wins.
    """
    n = len(adj)
    inf = math.inf
    cost = [inf] * n
    pred = [-1] * n
    prod = [inf] * n
    done = [False] * n
    cost[source] = 0.0
    prod[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        c, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        pu = 1.0 if u == source else prod[u]
        for v, w, r in adj[u]:
            if done[v]:
                continue
            nc = c + w
            if nc < cost[v] or (nc == cost[v] and u < pred[v]):
                cost[v] = nc
                pred[v] = u
                prod[v] = pu * r
                heapq.heappush(heap, (nc, v))
    return cost, pred, prod


def _direct_value(s: float, params: SimilarityParams) -> float:
    return s if params.eq8_literal else 1.0 / s


def shortest_path(net: PiNet, a: int, b: int, params: SimilarityParams) -> list[int] | None:
    """Vertex sequence of the path used for DIST(a, b), or None if unreachable."""
    src, dst = min(a, b), max(a, b)
    adj = _adjacency(net, edge_similarities(net, params), params)
    _, pred, prod = _dijkstra(adj, src)
    if src != dst and math.isinf(prod[dst]):
        return None
    path = [dst]
    while path[-1] != src:
        path.append(pred[path[-1]])
    path.reverse()
    return path if a == src else path[::-1]


def pairwise_distance(net: PiNet, a: int, b: int, params: SimilarityParams) -> float:
    if a == b:
        return 0.0
    csim = edge_similarities(net, params)
    src, dst = min(a, b), max(a, b)
    if params.direct_branch or params.eq8_literal:
        s = csim.get((src, dst))
        if s is not None and s > params.epsilon:
            return _direct_value(s, params)
    _, _, prod = _dijkstra(_adjacency(net, csim, params), src)
    return prod[dst]


def build_distance_matrix(net: PiNet, params: SimilarityParams, workers: int = 1) -> DistanceMatrix:
    """All-pairs distances, one Dijkstra per source, upper triangle mirrored."""
    n = net.n
    csim = edge_similarities(net, params)
    adj = _adjacency(net, csim, params)
    values = np.full((n, n), np.inf)
    np.fill_diagonal(values, 0.0)

    def row(i: int):
        _, _, prod = _dijkstra(adj, i)
        return i, prod

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(row, range(n)))
    else:
        results = map(row, range(n))
    for i, prod in results:
        if i + 1 < n:
            values[i, i + 1:] = prod[i + 1:]
            values[i + 1:, i] = prod[i + 1:]

    if params.direct_branch or params.eq8_literal:
        for (a, b), s in csim.items():
            if s > params.epsilon:
                values[a, b] = values[b, a] = _direct_value(s, params)
    return DistanceMatrix(values, params)

