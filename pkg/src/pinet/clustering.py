"""K-medoid community detection over a precomputed distance matrix.

Medoids start at the K highest-degree vertices; the loop alternates nearest
medoid assignment and per-cluster medoid update until the medoid set stops
changing. Vertices at infinite distance from every medoid go to an extra
overflow cluster (index ``k``) instead of being forced into one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import KTooLarge
from .graph import PiNet
from .quality import density, entropy
from .similarity import DistanceMatrix

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 100


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    medoids: tuple[int, ...]
    objective: float
    density: float | None = None
    entropy: float | None = None

    def as_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "medoids": list(self.medoids),
            "objective": self.objective,
            "density": self.density,
            "entropy": self.entropy,
        }


@dataclass
class Clustering:
    k: int
    assignment: list[int]
    medoids: list[int]
    iterations_run: int = 0
    objective: float = 0.0
    history: list[IterationRecord] = field(default_factory=list)

    @property
    def overflow(self) -> list[int]:
        """Vertices unreachable from every medoid."""
        return [v for v, q in enumerate(self.assignment) if q == self.k]

    def members(self, q: int) -> list[int]:
        return [v for v, c in enumerate(self.assignment) if c == q]

    def groups(self) -> list[list[int]]:
        """Non-empty clusters in index order, overflow last."""
        out = [self.members(q) for q in range(self.k + 1)]
        return [g for g in out if g]

    def is_medoid(self, v: int) -> bool:
        return v in self.medoids


def initial_medoids(net: PiNet, k: int) -> list[int]:
    """K highest-degree vertices; ties go to larger incident weight, then lower ID."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > net.n:
        raise KTooLarge(f"k={k} exceeds the {net.n} vertices in the graph")
    order = sorted(net.vertices(), key=lambda v: (-net.degree(v), -net.strength(v), v))
    return order[:k]


def _values(matrix) -> np.ndarray:
    return matrix.values if isinstance(matrix, DistanceMatrix) else np.asarray(matrix, dtype=float)


def assign(matrix, medoids: Sequence[int]) -> list[int]:
    """Index of the nearest medoid per vertex (first on ties); ``len(medoids)`` if none reachable."""
    d = _values(matrix)[:, list(medoids)]
    nearest = np.argmin(d, axis=1)
    unreachable = np.isinf(d[np.arange(d.shape[0]), nearest])
    nearest[unreachable] = len(medoids)
    return nearest.tolist()


def objective(matrix, assignment: Sequence[int], medoids: Sequence[int]) -> float:
    """Sum of distances from each reachable vertex to its medoid."""
    d = _values(matrix)
    k = len(medoids)
    return math.fsum(d[v, medoids[q]] for v, q in enumerate(assignment) if q < k)


def update_medoids(matrix, assignment: Sequence[int], medoids: Sequence[int]) -> list[int]:
    """Per cluster, the member with the least summed distance to its co-members.

    Members with infinite distances lose to any member without them; remaining
    ties go to the lower vertex ID. An empty cluster keeps its previous medoid.
    """
    d = _values(matrix)
    labels = np.asarray(assignment)
    out = []
    for q, old in enumerate(medoids):
        members = np.flatnonzero(labels == q)
        if members.size == 0:
            logger.info("cluster %d is empty; keeping medoid %d", q, old)
            out.append(old)
            continue
        sub = d[np.ix_(members, members)]
        infinite = np.isinf(sub)
        n_inf = infinite.sum(axis=1)
        finite_sum = np.where(infinite, 0.0, sub).sum(axis=1)
        best = min(range(members.size), key=lambda i: (n_inf[i], finite_sum[i], members[i]))
        out.append(int(members[best]))
    return out


def cluster(
    net: PiNet,
    matrix: DistanceMatrix,
    k: int,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    trace_quality: bool = False,
    attribute_weights: Sequence[float] | None = None,
) -> Clustering:
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    if matrix.n != net.n:
        raise ValueError(f"matrix is {matrix.n}x{matrix.n} but graph has {net.n} vertices")
    medoids = initial_medoids(net, k)
    history: list[IterationRecord] = []
    for it in range(1, max_iterations + 1):
        labels = assign(matrix, medoids)
        obj = objective(matrix, labels, medoids)
        dens = ent = None
        if trace_quality:
            partial = Clustering(k, labels, list(medoids))
            dens = density(partial, net)
            ent = entropy(partial, net, attribute_weights)
        history.append(IterationRecord(it, tuple(medoids), obj, dens, ent))
        new = update_medoids(matrix, labels, medoids)
        if set(new) == set(medoids):
            break
        medoids = new
    else:
        logger.info("stopped after %d iterations without convergence", max_iterations)
    return Clustering(k, labels, list(medoids), len(history), obj, history)
