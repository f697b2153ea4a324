import json

import numpy as np
import pytest

from socmig.graphs import (
    GraphGenerationError,
    GraphParameterError,
    all_pairs_distance,
    all_pairs_distance_from_edges,
    community_distance,
    gen_small_world,
    gen_star,
    graph_from_edges,
    graph_from_json,
    unreachable_pairs,
)


def floyd_warshall(n, edges):
    """Independent all-pairs oracle (min-plus relaxation)."""
    big = 10**6
    dist = np.full((n, n), big, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for i, j in edges:
        dist[i, j] = 1
        dist[j, i] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, [k]] + dist[[k], :])
    return dist


def check_distance_invariants(dist):
    assert (np.diag(dist) == 0).all()
    assert (dist == dist.T).all()
    n = dist.shape[0]
    for k in range(n):  # triangle inequality over all triples
        assert (dist <= dist[:, [k]] + dist[[k], :]).all()


class TestSmallWorld:
    def test_no_rewiring_gives_ring_lattice(self):
        g = gen_small_world(50, 4, 0.0, seed=3)
        assert all(deg == 4 for deg in g.degrees())
        assert len(g.edges) == 100
        assert (g.dist >= 0).all()
        # lattice distances are ceil(ring_gap / 2)
        gap = np.minimum(np.arange(50), 50 - np.arange(50))
        assert (g.dist[0] == (gap + 1) // 2).all()

    def test_edge_count_and_connectivity(self):
        for seed in (0, 1, 7):
            g = gen_small_world(50, 4, 0.3, seed=seed)
            assert len(g.edges) == 100
            assert (g.dist >= 0).all()

    def test_full_rewiring_shortens_mean_path(self):
        lattice = gen_small_world(50, 4, 0.0, seed=5)
        rewired = gen_small_world(50, 4, 1.0, seed=5)
        oracle_lattice = floyd_warshall(50, lattice.edges)
        oracle_rewired = floyd_warshall(50, rewired.edges)
        assert oracle_rewired.mean() < oracle_lattice.mean()

    def test_distance_matrix_matches_floyd_warshall(self):
        g = gen_small_world(50, 4, 0.3, seed=11)
        assert (g.dist == floyd_warshall(50, g.edges)).all()

    def test_distance_invariants(self):
        for n, p in ((20, 0.1), (50, 0.3), (100, 0.5)):
            g = gen_small_world(n, 4, p, seed=2)
            check_distance_invariants(g.dist)

    def test_seed_reproducibility(self):
        a = gen_small_world(50, 4, 0.3, seed=42)
        b = gen_small_world(50, 4, 0.3, seed=42)
        assert a.edges == b.edges
        assert (a.dist == b.dist).all()
        c = gen_small_world(50, 4, 0.3, seed=43)
        assert a.edges != c.edges

    @pytest.mark.parametrize(
        "n,k,p",
        [(2, 2, 0.3), (50, 3, 0.3), (50, 50, 0.3), (50, 0, 0.3), (50, 4, 1.5), (50, 4, -0.1)],
    )
    def test_parameter_errors(self, n, k, p):
        with pytest.raises(GraphParameterError):
            gen_small_world(n, k, p, seed=0)


class TestStar:
    def test_two_nodes(self):
        g = gen_star(2)
        assert g.edges == [(0, 1)]
        assert g.dist[0, 1] == 1 and g.dist[1, 0] == 1

    def test_leaf_to_leaf_distance(self):
        g = gen_star(5)
        assert g.dist[1, 3] == 2
        assert g.dist[0, 4] == 1

    def test_center_row(self):
        g = gen_star(5)
        assert g.dist[0].tolist() == [0, 1, 1, 1, 1]

    def test_degree_multiset(self):
        for n in (2, 5, 21):
            g = gen_star(n)
            assert sorted(g.degrees(), reverse=True) == [n - 1] + [1] * (n - 1)
            assert g.center == 0

    def test_too_small(self):
        with pytest.raises(GraphParameterError):
            gen_star(1)


class TestDistances:
    def test_path_graph(self):
        dist = all_pairs_distance_from_edges(3, [(0, 1), (1, 2)])
        assert dist[0, 2] == 2

    def test_disconnected_reported(self):
        dist = all_pairs_distance_from_edges(4, [(0, 1), (2, 3)])
        pairs = unreachable_pairs(dist)
        assert (0, 2) in pairs and (1, 3) in pairs
        with pytest.raises(GraphGenerationError):
            graph_from_edges(4, [(0, 1), (2, 3)])

    def test_all_pairs_matches_stored(self):
        g = gen_small_world(30, 4, 0.2, seed=1)
        assert (all_pairs_distance(g) == g.dist).all()


class TestCommunityDistance:
    def setup_method(self):
        self.dm = gen_star(5).dist

    def test_leaf_to_center(self):
        assert community_distance(self.dm, 1, {0}) == 1.0

    def test_leaf_to_other_leaves(self):
        assert community_distance(self.dm, 1, {2, 3, 4}) == 2.0

    def test_mixed_community(self):
        assert community_distance(self.dm, 1, {0, 2}) == 1.5

    def test_singleton_equals_matrix_entry(self):
        g = gen_small_world(20, 4, 0.3, seed=9)
        for i in range(g.n):
            for j in range(g.n):
                assert community_distance(g.dist, i, {j}) == g.dist[i, j]

    def test_empty_is_absent(self):
        assert community_distance(self.dm, 1, set()) is None

    def test_self_distance_included(self):
        # member's own zero distance participates in the average
        assert community_distance(self.dm, 1, {1, 2}) == 1.0


class TestJsonInterface:
    def test_round_trip(self):
        g = gen_small_world(20, 4, 0.3, seed=4)
        g2 = graph_from_json(g.to_json())
        assert g2.n == g.n
        assert g2.edges == g.edges
        assert (g2.dist == g.dist).all()
        assert g2.center is None

    def test_star_center_serialized(self):
        g = gen_star(5)
        obj = json.loads(g.to_json())
        assert obj == {"n": 5, "edges": [[0, 1], [0, 2], [0, 3], [0, 4]], "center": 0}

    def test_edges_sorted_for_stable_bytes(self):
        g = gen_small_world(20, 4, 0.3, seed=4)
        edges = json.loads(g.to_json())["edges"]
        assert edges == sorted(edges)
        assert all(i < j for i, j in edges)
        assert g.to_json() == graph_from_json(g.to_json()).to_json()
