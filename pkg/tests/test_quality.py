from __future__ import annotations

import json
import math
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import entropy_bits, name, random_net
from pinet.clustering import Clustering
from pinet.errors import MissingAttributes
from pinet.graph import from_edges
from pinet.quality import (
    CSV_HEADER, density, entropy, evaluate, f_measure, network_stats, partition_entropy,
    partition_f_measure,
)


def annotated(edges, cpis):
    return from_edges(edges, cpis=cpis)


def path_net(n, values=None):
    values = values or [(1,) * 5] * n
    return annotated([(name(i), name(i + 1), 1) for i in range(n - 1)],
                     {name(i): values[i] for i in range(n)})


class TestDensity:
    def test_single_cluster(self):
        assert density([0] * 5, path_net(5)) == 1.0

    def test_singletons(self):
        assert density(list(range(5)), path_net(5)) == 0.0

    def test_six_of_ten(self):
        # 5-cycle inside {0..4} (5 edges) + 1 edge inside {5,6} + 4 cross edges
        edges = [(name(i), name((i + 1) % 5), 1) for i in range(5)]
        edges += [(name(5), name(6), 1)]
        edges += [(name(0), name(5), 1), (name(1), name(6), 1), (name(2), name(5), 1), (name(3), name(6), 1)]
        net = annotated(edges, {})
        assert net.edge_count == 10
        assert density([0, 0, 0, 0, 0, 1, 1], net) == pytest.approx(0.6)

    def test_no_edges(self):
        net = annotated([], {"a": (1,) * 5, "b": (1,) * 5})
        assert density([0, 1], net) == 0.0

    def test_accepts_clustering(self):
        c = Clustering(2, [0, 0, 1, 1, 1], [0, 2])
        assert density(c, path_net(5)) == pytest.approx(3 / 4)


class TestEntropy:
    def test_homogeneous(self):
        assert entropy([0, 0, 1, 1], path_net(4)) == 0.0

    def test_binary_half_split(self):
        # one attribute carries weight; it splits 50/50 inside a single cluster
        vals = [(1, 1, 1, 1, 1), (1, 1, 1, 1, 1), (1, 1, 1, 1, 2), (1, 1, 1, 1, 2)]
        assert entropy([0] * 4, path_net(4, vals), (0, 0, 0, 0, 1)) == pytest.approx(1.0)

    def test_relabel_invariant(self):
        rng = random.Random(1)
        attrs = [tuple(rng.randint(1, 4) for _ in range(5)) for _ in range(20)]
        labels = [rng.randrange(3) for _ in range(20)]
        perm = {1: 4, 2: 1, 3: 3, 4: 2}
        relabeled = [tuple(perm[x] for x in row) for row in attrs]
        assert partition_entropy(labels, attrs) == pytest.approx(partition_entropy(labels, relabeled))

    def test_oracle(self):
        rng = random.Random(2)
        for _ in range(50):
            n = rng.randint(1, 15)
            attrs = [tuple(rng.randint(1, 3) for _ in range(5)) for _ in range(n)]
            labels = [rng.randrange(4) for _ in range(n)]
            weights = [rng.uniform(0.1, 2) for _ in range(5)]
            groups = [[v for v in range(n) if labels[v] == q] for q in sorted(set(labels))]
            want = sum(w / sum(weights) * entropy_bits(groups, [a[i] for a in attrs])
                       for i, w in enumerate(weights))
            assert partition_entropy(labels, attrs, weights) == pytest.approx(want)

    def test_split_into_homogeneous_parts_never_increases(self):
        rng = random.Random(3)
        for _ in range(100):
            n = rng.randint(2, 12)
            attrs = [tuple(rng.randint(1, 3) for _ in range(5)) for _ in range(n)]
            labels = [rng.randrange(3) for _ in range(n)]
            before = partition_entropy(labels, attrs)
            # split every cluster by full attribute vector
            split = [hash((labels[v], attrs[v])) for v in range(n)]
            assert partition_entropy(split, attrs) <= before + 1e-12
            assert partition_entropy(split, attrs) == 0.0

    def test_missing_cpi(self):
        net = from_edges([("a", "b", 1)])
        with pytest.raises(MissingAttributes):
            entropy([0, 0], net)


class TestFMeasure:
    def test_aligned(self):
        vals = [(1,) * 5, (1,) * 5, (2,) * 5, (2,) * 5]
        assert f_measure([0, 0, 1, 1], path_net(4, vals)) == 1.0

    def test_single_cluster_uniform(self):
        assert f_measure([0] * 4, path_net(4)) == 1.0

    def test_crossed_clusters(self):
        # values x,x,y,y; clusters {1,3},{2,4}
        attrs = [(1,), (1,), (2,), (2,)]
        assert partition_f_measure([0, 1, 0, 1], attrs) == pytest.approx(0.5)

    def test_averaged_over_attributes(self):
        # clusters align with the first attribute and cut across the second
        attrs = [(1, 1), (1, 2), (2, 1), (2, 2)]
        assert partition_f_measure([0, 0, 1, 1], attrs) == pytest.approx((1.0 + 0.5) / 2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_metric_ranges_and_permutation(seed):
    rng = random.Random(seed)
    net, _, _ = random_net(rng, n_range=(2, 15), p=0.3, connected=False)
    k = rng.randint(1, net.n)
    labels = [rng.randrange(k) for _ in net.vertices()]
    perm = list(range(k))
    rng.shuffle(perm)
    permuted = [perm[q] for q in labels]
    d, e, f = density(labels, net), entropy(labels, net), f_measure(labels, net)
    assert 0 <= d <= 1 and e >= 0 and 0 <= f <= 1 + 1e-12
    assert density(permuted, net) == d
    assert entropy(permuted, net) == pytest.approx(e)
    assert f_measure(permuted, net) == pytest.approx(f)
    inter = sum(labels[a] != labels[b] for a, b, _ in net.edges())
    if net.edge_count:
        assert d + inter / net.edge_count == pytest.approx(1.0)


class TestNetworkStats:
    def test_triangle(self):
        s = network_stats(from_edges([("a", "b", 1), ("b", "c", 1), ("a", "c", 1)]))
        assert s.clustering_coefficient == 1.0 and s.graph_density == 1.0

    def test_path3(self):
        s = network_stats(from_edges([("a", "b", 1), ("b", "c", 1)]))
        assert s.clustering_coefficient == 0.0

    def test_star4(self):
        s = network_stats(from_edges([("c", f"l{i}", 1) for i in range(4)]))
        assert s.degree_centralization == pytest.approx(1.0)
        assert s.avg_neighbors == pytest.approx(8 / 5)

    def test_degenerate(self):
        assert network_stats(from_edges([]), []).vertex_count == 0
        s = network_stats(from_edges([("a", "b", 1)]))
        assert (s.degree_centralization, s.clustering_coefficient) == (0.0, 0.0)

    def test_matches_networkx(self):
        rng = random.Random(4)
        for _ in range(40):
            net, _, _ = random_net(rng, n_range=(3, 25), p=0.25, connected=rng.random() < 0.5)
            subset = [v for v in net.vertices() if rng.random() < 0.8] or [0]
            g = nx.Graph(net.graph.subgraph(subset))
            s = network_stats(net, subset)
            n = g.number_of_nodes()
            assert s.vertex_count == n and s.edge_count == g.number_of_edges()
            assert s.graph_density == pytest.approx(nx.density(g) if n > 1 else 0.0)
            assert s.clustering_coefficient == pytest.approx(nx.average_clustering(g))
            if n > 2:
                degs = [d for _, d in g.degree()]
                want = sum(max(degs) - d for d in degs) / ((n - 1) * (n - 2))
                assert s.degree_centralization == pytest.approx(want)
            for field in ("graph_density", "clustering_coefficient", "degree_centralization"):
                assert 0 <= getattr(s, field) <= 1


def test_evaluate_report():
    vals = [(1,) * 5, (1,) * 5, (2,) * 5, (2,) * 5]
    net = path_net(4, vals)
    c = Clustering(2, [0, 0, 1, 2], [0, 2])
    r = evaluate(c, net, alpha=0.5)
    assert r.k == 2 and r.unreachable == 1
    assert len(r.per_community) == 3
    assert r.csv_row() == [2, 0.5, r.density, r.entropy, r.f_measure]
    assert len(CSV_HEADER) == len(r.csv_row())
    doc = json.loads(r.to_json())
    assert doc["density"] == r.density and len(doc["per_community"]) == 3


def test_entropy_weights_scale_free():
    rng = random.Random(5)
    attrs = [tuple(rng.randint(1, 3) for _ in range(5)) for _ in range(12)]
    labels = [rng.randrange(3) for _ in range(12)]
    for scale in (0.1, 3, 1000):
        a = partition_entropy(labels, attrs, [1, 2, 3, 4, 5])
        b = partition_entropy(labels, attrs, [scale * w for w in (1, 2, 3, 4, 5)])
        assert a == pytest.approx(b)
    assert not math.isnan(partition_entropy([0], [(1,) * 5]))
