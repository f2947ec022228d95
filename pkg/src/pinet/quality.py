"""Community validation: density, attribute entropy, F-measure, per-community statistics.

Metric functions accept a ``Clustering`` or a plain per-vertex label sequence.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .errors import MissingAttributes
from .graph import PiNet


@dataclass(frozen=True)
class NetworkStats:
    vertex_count: int
    edge_count: int
    graph_density: float
    avg_neighbors: float
    clustering_coefficient: float
    degree_centralization: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class QualityReport:
    density: float
    entropy: float
    f_measure: float
    per_community: list[NetworkStats] = field(default_factory=list)
    k: int | None = None
    alpha: float | None = None
    unreachable: int = 0

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "alpha": self.alpha,
            "density": self.density,
            "entropy": self.entropy,
            "f_measure": self.f_measure,
            "unreachable": self.unreachable,
            "per_community": [s.as_dict() for s in self.per_community],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def csv_row(self) -> list:
        return [self.k, self.alpha, self.density, self.entropy, self.f_measure]


CSV_HEADER = ["k", "alpha", "density", "entropy", "f_measure"]


def _labels(clustering) -> list[int]:
    return list(getattr(clustering, "assignment", clustering))


def _groups(labels: Sequence[int]) -> list[list[int]]:
    by_label: dict[int, list[int]] = defaultdict(list)
    for v, q in enumerate(labels):
        by_label[q].append(v)
    return [by_label[q] for q in sorted(by_label)]


def _attributes(net: PiNet) -> list[tuple[int, ...]]:
    rows = []
    for v in net.vertices():
        cpi = net.cpi(v)
        if cpi is None:
            raise MissingAttributes(f"vertex {v} ({net.address(v)}) has no CPI")
        rows.append(tuple(cpi))
    return rows


def density(clustering, net: PiNet) -> float:
    """Fraction of edges whose endpoints share a cluster."""
    labels = _labels(clustering)
    total = intra = 0
    for a, b, _ in net.edges():
        total += 1
        intra += labels[a] == labels[b]
    return intra / total if total else 0.0


def _shannon(counts: Iterable[int], size: int) -> float:
    h = 0.0
    for c in counts:
        if c:
            p = c / size
            h -= p * math.log2(p)
    return h


def partition_entropy(
    labels: Sequence[int],
    attributes: Sequence[Sequence[int]],
    weights: Sequence[float] | None = None,
) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    m = len(attributes[0])
    weights = [1.0] * m if weights is None else list(weights)
    if len(weights) != m:
        raise MissingAttributes(f"{len(weights)} weights for {m} attributes")
    wsum = math.fsum(weights)
    groups = _groups(labels)
    total = 0.0
    for i, w in enumerate(weights):
        per_attr = 0.0
        for g in groups:
            counts = Counter(attributes[v][i] for v in g)
            per_attr += len(g) / n * _shannon(counts.values(), len(g))
        total += w / wsum * per_attr
    return total


def entropy(clustering, net: PiNet, attribute_weights: Sequence[float] | None = None) -> float:
    """Weighted attribute-value entropy of the clusters, in bits."""
    return partition_entropy(_labels(clustering), _attributes(net), attribute_weights)


def partition_f_measure(labels: Sequence[int], attributes: Sequence[Sequence[int]]) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    m = len(attributes[0])
    groups = _groups(labels)
    score = 0.0
    for i in range(m):
        overall = Counter(row[i] for row in attributes)
        in_group = [Counter(attributes[v][i] for v in g) for g in groups]
        attr_score = 0.0
        for value, n_value in overall.items():
            best = 0.0
            for g, counts in zip(groups, in_group):
                hit = counts.get(value, 0)
                if not hit:
                    continue
                p, r = hit / len(g), hit / n_value
                best = max(best, 2 * p * r / (p + r))
            attr_score += best * n_value
        score += attr_score / n
    return score / m


def f_measure(clustering, net: PiNet) -> float:
    """Prevalence-weighted best-cluster F1 per attribute value, averaged over attributes."""
    return partition_f_measure(_labels(clustering), _attributes(net))


def network_stats(net: PiNet, subset: Iterable[int] | None = None) -> NetworkStats:
    """Unweighted statistics of the subgraph induced by ``subset`` (whole graph if None)."""
    nodes = set(net.vertices()) if subset is None else set(subset)
    adj = {v: {u for u in net.neighbors(v) if u in nodes} for v in nodes}
    n = len(nodes)
    m = sum(len(s) for s in adj.values()) // 2
    graph_density = 2 * m / (n * (n - 1)) if n > 1 else 0.0
    avg_neighbors = 2 * m / n if n else 0.0

    local = []
    for v, nbrs in adj.items():
        k = len(nbrs)
        if k < 2:
            local.append(0.0)
            continue
        links = sum(1 for u in nbrs for w in adj[u] if w in nbrs) // 2
        local.append(2 * links / (k * (k - 1)))
    cc = math.fsum(local) / n if n else 0.0

    if n > 2:
        degrees = [len(s) for s in adj.values()]
        kmax = max(degrees)
        centralization = sum(kmax - k for k in degrees) / ((n - 1) * (n - 2))
    else:
        centralization = 0.0
    return NetworkStats(n, m, graph_density, avg_neighbors, cc, centralization)


def evaluate(
    clustering,
    net: PiNet,
    attribute_weights: Sequence[float] | None = None,
    alpha: float | None = None,
) -> QualityReport:
    labels = _labels(clustering)
    groups = _groups(labels)
    k = getattr(clustering, "k", len(groups))
    overflow = getattr(clustering, "overflow", [])
    return QualityReport(
        density=density(labels, net),
        entropy=entropy(labels, net, attribute_weights),
        f_measure=f_measure(labels, net),
        per_community=[network_stats(net, g) for g in groups],
        k=k,
        alpha=alpha,
        unreachable=len(overflow),
    )
