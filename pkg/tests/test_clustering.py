from __future__ import annotations

import itertools
import math
import random

import numpy as np
import pytest

from oracles import best_medoid_cost, medoid_cost, name, random_net
from pinet.clustering import assign, cluster, initial_medoids, objective, update_medoids
from pinet.errors import KTooLarge
from pinet.graph import from_edges
from pinet.similarity import SimilarityParams, build_distance_matrix

SAME = (1, 1, 1, 1, 1)
INF = math.inf


def clique_pair(size=4, hubs=False):
    """Two disjoint cliques. With ``hubs`` the heavier edges make vertex 0 the
    strongest and vertex ``size`` the runner-up, so the seeds land one per clique."""
    edges = []
    for base, hub_w in ((0, 3), (size, 2)):
        for i, j in itertools.combinations(range(size), 2):
            w = hub_w if hubs and i == 0 else 1
            edges.append((name(base + i), name(base + j), w))
    return from_edges(edges, cpis={name(i): SAME for i in range(2 * size)})


class TestInitial:
    def test_k_equals_n(self):
        net = from_edges([("a", "b", 1), ("b", "c", 1)])
        assert sorted(initial_medoids(net, 3)) == [0, 1, 2]

    def test_star_center(self):
        net = from_edges([("z", f"l{i}", 1) for i in range(5)])
        assert initial_medoids(net, 1) == [net.index["z"]]

    def test_degree_tie_lower_id(self):
        # degrees: a=4, b=4, c=3 ...; equal unit weights
        edges = [("a", x, 1) for x in "bcde"] + [("b", x, 1) for x in "cfg"] + [("c", "h", 1)]
        net = from_edges(edges)
        assert [net.degree(v) for v in (0, 1, 2)] == [4, 4, 3]
        assert initial_medoids(net, 2) == [0, 1]

    def test_weight_breaks_degree_tie(self):
        net = from_edges([("a", "x", 1), ("b", "y", 5)])
        assert initial_medoids(net, 1) == [net.index["b"]]

    def test_bounds(self):
        net = from_edges([("a", "b", 1)])
        with pytest.raises(KTooLarge):
            initial_medoids(net, 3)
        with pytest.raises(ValueError):
            initial_medoids(net, 0)


class TestAssign:
    def test_medoid_to_itself_and_argmin(self):
        d = np.array([[0, 2, 9], [2, 0, 4], [9, 4, 0]], dtype=float)
        assert assign(d, [0, 2]) == [0, 0, 1]

    def test_tie_lowest_medoid_index(self):
        d = np.array([[0, 3, 1], [3, 0, 3], [1, 3, 0]], dtype=float)
        assert assign(d, [2, 0])[1] == 0

    def test_overflow(self):
        d = np.array([[0, 1, INF], [1, 0, INF], [INF, INF, 0]])
        assert assign(d, [0]) == [0, 0, 1]


class TestUpdate:
    def test_singleton(self):
        d = np.array([[0, 1], [1, 0]], dtype=float)
        assert update_medoids(d, [0, 1], [0, 1]) == [0, 1]

    def test_three_member_sums(self):
        # ab 1, ac 4, bc 2 -> sums a=5, b=3, c=6
        d = np.array([[0, 1, 4], [1, 0, 2], [4, 2, 0]], dtype=float)
        assert update_medoids(d, [0, 0, 0], [0]) == [1]

    def test_symmetric_pair_lower_id(self):
        d = np.array([[0, 3], [3, 0]], dtype=float)
        assert update_medoids(d, [0, 0], [1]) == [0]

    def test_infinite_excluded_when_finite_exists(self):
        d = np.array([[0, 1, INF], [1, 0, 50], [INF, 50, 0]])
        assert update_medoids(d, [0, 0, 0], [0]) == [1]

    def test_empty_cluster_keeps_medoid(self):
        d = np.zeros((3, 3))
        assert update_medoids(d, [0, 0, 0], [2, 1]) == [0, 1]


class TestCluster:
    def test_two_cliques(self):
        net = clique_pair(hubs=True)
        assert initial_medoids(net, 2) == [0, 4]
        m = build_distance_matrix(net, SimilarityParams(alpha=1.0))
        result = cluster(net, m, 2)
        groups = sorted(sorted(g) for g in result.groups())
        assert groups == [[0, 1, 2, 3], [4, 5, 6, 7]]
        # brute force over every 2-partition: the two cliques are the optimum
        best = None
        for mask in range(1, 2 ** 7):
            labels = [0] + [(mask >> i) & 1 for i in range(7)]
            parts = [[v for v in range(8) if labels[v] == q] for q in (0, 1)]
            if not parts[1]:
                continue
            cost = []
            for p in parts:
                cost.append(min(medoid_cost(m.values[np.ix_(p, p)], [i]) for i in range(len(p))))
            total = (sum(c[0] for c in cost), sum(c[1] for c in cost))
            best = total if best is None or total < best else best
        assert (len(result.overflow), result.objective) == pytest.approx(best)

    def test_symmetric_cliques_seed_in_one_component(self):
        # all degrees and strengths tie, so both seeds come from the first clique
        # and the second clique is unreachable from either of them
        net = clique_pair()
        m = build_distance_matrix(net, SimilarityParams(alpha=1.0))
        result = cluster(net, m, 2)
        assert result.medoids == [0, 1]
        assert result.overflow == [4, 5, 6, 7]

    def test_k1(self):
        rng = random.Random(4)
        net, _, _ = random_net(rng, n=8, p=0.4)
        m = build_distance_matrix(net, SimilarityParams())
        result = cluster(net, m, 1)
        sums = m.values.sum(axis=1)
        assert result.medoids == [int(np.argmin(sums))]
        assert set(result.assignment) == {0}

    def test_deterministic(self):
        rng = random.Random(5)
        net, _, _ = random_net(rng, n=20, p=0.2)
        m = build_distance_matrix(net, SimilarityParams())
        a, b = cluster(net, m, 3, trace_quality=True), cluster(net, m, 3, trace_quality=True)
        assert a == b

    def test_overflow_two_components(self):
        edges = [("a", "b", 1), ("b", "c", 1), ("x", "y", 1)]
        net = from_edges(edges, cpis={v: SAME for v in "abcxy"})
        m = build_distance_matrix(net, SimilarityParams())
        result = cluster(net, m, 1)
        assert [net.address(v) for v in result.overflow] == ["x", "y"]
        assert result.groups()[-1] == result.overflow
        assert math.isfinite(result.objective)

    def test_history_and_trace(self):
        rng = random.Random(6)
        net, _, _ = random_net(rng, n=25, p=0.15)
        m = build_distance_matrix(net, SimilarityParams())
        result = cluster(net, m, 4, trace_quality=True)
        assert len(result.history) == result.iterations_run
        assert all(0 <= h.density <= 1 and h.entropy >= 0 for h in result.history)
        assert result.history[-1].objective == result.objective

    def test_max_iterations(self):
        rng = random.Random(7)
        net, _, _ = random_net(rng, n=25, p=0.15)
        m = build_distance_matrix(net, SimilarityParams())
        assert cluster(net, m, 4, max_iterations=1).iterations_run == 1
        with pytest.raises(ValueError):
            cluster(net, m, 4, max_iterations=0)

    def test_matrix_size_checked(self):
        net = clique_pair()
        other = build_distance_matrix(clique_pair(3), SimilarityParams())
        with pytest.raises(ValueError):
            cluster(net, other, 2)


def test_objective_monotone_and_partition_valid():
    rng = random.Random(8)
    for _ in range(100):
        net, _, _ = random_net(rng, n_range=(5, 30), p=0.12, connected=rng.random() < 0.7)
        m = build_distance_matrix(net, SimilarityParams(alpha=rng.choice([0, 0.5, 1])))
        k = rng.randint(1, min(5, net.n))
        result = cluster(net, m, k, trace_quality=False)
        objs = [(sum(1 for q in assign(m, h.medoids) if q == k), h.objective) for h in result.history]
        for prev, nxt in zip(objs, objs[1:]):
            assert nxt <= (prev[0], prev[1] + 1e-9)
        assert len(result.assignment) == net.n
        assert all(0 <= q <= k for q in result.assignment)
        for q, med in enumerate(result.medoids):
            assert result.assignment[med] == q


def test_never_better_than_exhaustive_optimum():
    rng = random.Random(9)
    for _ in range(60):
        net, _, _ = random_net(rng, n_range=(3, 8))
        k = rng.randint(1, min(3, net.n))
        m = build_distance_matrix(net, SimilarityParams(alpha=rng.choice([0, 0.5, 1])))
        result = cluster(net, m, k)
        got = (len(result.overflow), result.objective)
        best = best_medoid_cost(m.values.tolist(), k)
        assert got[0] > best[0] or (got[0] == best[0] and got[1] >= best[1] - 1e-9)
        assert objective(m, result.assignment, result.medoids) == result.objective
