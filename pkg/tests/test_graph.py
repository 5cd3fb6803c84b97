import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphfuse.graph import (
    Graph,
    GraphSeries,
    bfs_distances,
    connected_components,
    degrees,
    from_edge_list,
    induced_edge_count,
    kth_neighborhood,
    to_edge_list,
)

import oracles


def complete(n):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


@st.composite
def small_graphs(draw):
    n = draw(st.integers(min_value=1, max_value=10))
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    pairs = draw(st.lists(st.sampled_from(all_pairs), max_size=30)) if all_pairs else []
    return Graph(n, pairs)


class TestFromEdgeList:
    def test_dedup_and_self_loops(self):
        g = from_edge_list(3, [(0, 1), (1, 0), (1, 1), (1, 2)])
        assert g.edges == ((0, 1), (1, 2))
        assert g.size == 2

    def test_empty(self):
        g = from_edge_list(4, [])
        assert g.size == 0
        assert g.n == 4

    def test_out_of_range_names_pair(self):
        with pytest.raises(ValueError, match=r"\(0, 5\)"):
            from_edge_list(2, [(0, 5)])

    def test_negative_vertex_rejected(self):
        with pytest.raises(ValueError):
            from_edge_list(3, [(-1, 0)])

    @given(small_graphs())
    @settings(max_examples=60, deadline=None)
    def test_round_trip(self, g):
        assert from_edge_list(g.n, to_edge_list(g)) == g


class TestDegrees:
    def test_complete(self):
        assert list(degrees(complete(4))) == [3, 3, 3, 3]

    def test_star(self):
        g = Graph(6, [(0, i) for i in range(1, 6)])
        assert list(degrees(g)) == [5, 1, 1, 1, 1, 1]

    def test_empty(self):
        assert list(degrees(Graph(3))) == [0, 0, 0]

    @given(small_graphs())
    @settings(max_examples=60, deadline=None)
    def test_handshake(self, g):
        assert degrees(g).sum() == 2 * g.size

    def test_degree_array_read_only(self):
        g = complete(3)
        with pytest.raises(ValueError):
            g.degree_array[0] = 7


class TestBfsDistances:
    def test_path(self):
        assert list(bfs_distances(path(3), 0)) == [0, 1, 2]

    def test_unreachable_is_inf(self):
        g = Graph(3, [(0, 1)])
        d = bfs_distances(g, 0)
        assert list(d[:2]) == [0, 1]
        assert np.isinf(d[2])

    def test_complete_from_any_source(self):
        for s in range(4):
            d = bfs_distances(complete(4), s)
            assert d[s] == 0
            assert sorted(d) == [0, 1, 1, 1]

    def test_source_out_of_range(self):
        with pytest.raises(ValueError):
            bfs_distances(complete(3), 3)

    def test_matches_floyd_warshall(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            g = oracles.random_graph(rng, int(rng.integers(1, 13)), rng.random())
            fw = oracles.floyd_warshall(g)
            src = int(rng.integers(0, g.n))
            assert np.array_equal(bfs_distances(g, src), fw[src])


class TestKthNeighborhood:
    def test_path_radius_1(self):
        assert kth_neighborhood(path(5), 2, 1) == {1, 2, 3}

    def test_path_radius_2(self):
        assert kth_neighborhood(path(5), 2, 2) == {0, 1, 2, 3, 4}

    def test_radius_0_is_self(self):
        assert kth_neighborhood(path(5), 2, 0) == {2}

    def test_isolated_vertex(self):
        g = Graph(3, [(0, 1)])
        for k in range(4):
            assert kth_neighborhood(g, 2, k) == {2}

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            kth_neighborhood(path(3), 0, -1)

    @given(small_graphs(), st.integers(min_value=0, max_value=4))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_radius(self, g, k):
        v = 0
        inner = kth_neighborhood(g, v, k)
        outer = kth_neighborhood(g, v, k + 1)
        assert inner <= outer

    @given(small_graphs())
    @settings(max_examples=40, deadline=None)
    def test_reaches_component(self, g):
        comp = next(c for c in connected_components(g) if 0 in c)
        assert kth_neighborhood(g, 0, g.n) == set(comp)


class TestInducedEdgeCount:
    def test_complete_triple(self):
        assert induced_edge_count(complete(4), [0, 1, 3]) == 3

    def test_path_endpoints(self):
        assert induced_edge_count(path(3), [0, 2]) == 0

    def test_matches_pair_scan(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            g = oracles.random_graph(rng, 10, 0.5)
            s = [v for v in range(10) if rng.random() < 0.5]
            assert induced_edge_count(g, s) == oracles.oracle_pair_count(g, s)

    def test_out_of_range_member(self):
        with pytest.raises(ValueError):
            induced_edge_count(complete(3), [0, 7])


class TestGraphBasics:
    def test_has_edge(self):
        g = Graph(4, [(0, 2), (1, 3)])
        assert g.has_edge(0, 2) and g.has_edge(2, 0)
        assert not g.has_edge(0, 1)
        assert not g.has_edge(2, 2)

    def test_neighbors_sorted(self):
        g = Graph(5, [(3, 0), (3, 4), (1, 3)])
        assert g.neighbors(3) == (0, 1, 4)

    def test_equality_and_hash(self):
        a = Graph(3, [(0, 1), (1, 2)])
        b = Graph(3, [(2, 1), (1, 0)])
        assert a == b
        assert hash(a) == hash(b)
        assert a != Graph(4, [(0, 1), (1, 2)])

    def test_connected_components(self):
        g = Graph(6, [(0, 1), (1, 2), (4, 5)])
        assert connected_components(g) == [[0, 1, 2], [3], [4, 5]]


class TestGraphSeries:
    def test_mixed_vertex_counts_rejected(self):
        with pytest.raises(ValueError, match="expected"):
            GraphSeries([Graph(3), Graph(4)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            GraphSeries([])

    def test_one_based_time_access(self):
        g1, g2 = Graph(3, [(0, 1)]), Graph(3, [(1, 2)])
        series = GraphSeries([g1, g2])
        assert series.at_time(1) == g1
        assert series.at_time(2) == g2
        assert len(series) == series.t_max == 2
        with pytest.raises(ValueError):
            series.at_time(0)
        with pytest.raises(ValueError):
            series.at_time(3)
