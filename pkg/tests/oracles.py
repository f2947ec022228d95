"""Independent reference implementations used as test oracles.

Nothing here calls into the library's similarity or clustering code; the
formulas are re-derived from raw edge lists and CPI tuples.
"""

from __future__ import annotations

import itertools
import math
import random

from pinet.graph import PiNet, from_edges


def name(i: int) -> str:
    return f"u{i:02d}@x.org"


def random_edges(rng: random.Random, n: int, p: float = 0.3, max_w: int = 5, connected: bool = True):
    """Random spanning tree (if ``connected``) plus extra edges with probability ``p``."""
    edges = {}
    if connected:
        order = list(range(n))
        rng.shuffle(order)
        for i in range(1, n):
            a, b = order[i], order[rng.randrange(i)]
            edges[(min(a, b), max(a, b))] = rng.randint(1, max_w)
    for a, b in itertools.combinations(range(n), 2):
        if (a, b) not in edges and rng.random() < p:
            edges[(a, b)] = rng.randint(1, max_w)
    return edges


def random_net(
    rng: random.Random,
    n: int | None = None,
    n_range: tuple[int, int] = (3, 8),
    p: float = 0.3,
    tags: int = 3,
    connected: bool = True,
) -> tuple[PiNet, dict, dict]:
    """Annotated random PiNet plus the raw (edges, cpis) it was built from, keyed by vertex ID."""
    n = n if n is not None else rng.randint(*n_range)
    edges = random_edges(rng, n, p, connected=connected)
    cpis = {i: tuple(rng.randint(1, tags) for _ in range(5)) for i in range(n)}
    net = from_edges(
        [(name(a), name(b), w) for (a, b), w in edges.items()],
        cpis={name(i): c for i, c in cpis.items()},
    )
    return net, edges, cpis


def csim_table(n: int, edges: dict, cpis: dict, alpha: float, weights=(1, 1, 1, 1, 1)) -> dict:
    strength = [0] * n
    for (a, b), w in edges.items():
        strength[a] += w
        strength[b] += w
    out = {}
    for (a, b), w in edges.items():
        s = w / (strength[a] + strength[b] - w)
        c = sum(wt for x, y, wt in zip(cpis[a], cpis[b], weights) if x == y) / sum(weights)
        out[(a, b)] = out[(b, a)] = alpha * s + (1 - alpha) * c
    return out


def max_product_distances(n: int, csim: dict) -> list[list[float]]:
    """Enumerate every simple path; distance = 1 / best similarity product."""
    adj = {v: [u for u in range(n) if (v, u) in csim and csim[(v, u)] > 0] for v in range(n)}
    best = [[0.0] * n for _ in range(n)]

    def walk(src, v, prod, seen):
        for u in adj[v]:
            if u in seen:
                continue
            p = prod * csim[(v, u)]
            if p > best[src][u]:
                best[src][u] = p
            seen.add(u)
            walk(src, u, p, seen)
            seen.discard(u)

    for s in range(n):
        walk(s, s, 1.0, {s})
    dist = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = 0.0
        for j in range(n):
            if i != j and best[i][j] > 0:
                dist[i][j] = 1.0 / best[i][j]
    return dist


def medoid_cost(dist, medoids) -> tuple[int, float]:
    """(number of vertices unreachable from every medoid, summed finite distance)."""
    unreachable, total = 0, []
    for row in dist:
        d = min(row[m] for m in medoids)
        if math.isinf(d):
            unreachable += 1
        else:
            total.append(d)
    return unreachable, math.fsum(total)


def best_medoid_cost(dist, k: int) -> tuple[int, float]:
    n = len(dist)
    return min(medoid_cost(dist, c) for c in itertools.combinations(range(n), k))


def entropy_bits(groups, values) -> float:
    n = sum(len(g) for g in groups)
    h = 0.0
    for g in groups:
        counts = {}
        for v in g:
            counts[values[v]] = counts.get(values[v], 0) + 1
        hg = -sum(c / len(g) * math.log2(c / len(g)) for c in counts.values())
        h += len(g) / n * hg
    return h


def planted_cliques(k: int, size: int, bridge_weight: int = 1, clique_weight: int = 3):
    """``k`` cliques chained by single light bridges; CPIs uniform within a clique."""
    edges = []
    cpis = {}
    for c in range(k):
        base = c * size
        for i, j in itertools.combinations(range(size), 2):
            edges.append((name(base + i), name(base + j), clique_weight))
        for i in range(size):
            cpis[name(base + i)] = (c % 5 + 1, c % 5 + 1, c % 4 + 1, 1, c % 4 + 1)
        if c:
            edges.append((name(base - 1), name(base), bridge_weight))
    return from_edges(edges, cpis=cpis)
