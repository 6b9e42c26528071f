import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netclust import (
    DomainError,
    Graph,
    InputError,
    Partition,
    average_degree,
    conductance,
    connected_components,
    degree,
    edge_boundary,
    max_conductance,
    neighborhood,
    neighborhood_moment,
    path_distance,
    read_edge_list,
    write_edge_list,
    volume,
)
from netclust.graph import bfs_distances, induced_subgraph

from conftest import (
    complete_graph,
    path_graph,
    random_connected_graph,
    triangle,
    two_triangles,
)


class TestGraphConstruction:
    def test_rejects_self_links(self):
        with pytest.raises(InputError, match="self-link"):
            Graph(3, [0, 1], [0, 2])

    def test_rejects_duplicate_edges(self):
        with pytest.raises(InputError, match="duplicate"):
            Graph(3, [0, 1, 0], [1, 2, 1])

    def test_rejects_duplicate_edges_reversed_orientation(self):
        with pytest.raises(InputError, match="duplicate"):
            Graph(3, [0, 1], [1, 0])

    def test_rejects_out_of_range_endpoint(self):
        with pytest.raises(InputError, match="out of range"):
            Graph(2, [0], [2])

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(InputError, match="positive"):
            Graph(2, [0], [1], [0.0])

    def test_neighbors_symmetric(self):
        g = Graph(3, [0, 1], [1, 2])
        assert sorted(g.neighbors(1).tolist()) == [0, 2]
        assert g.neighbors(0).tolist() == [1]

    def test_from_edges_mixed_weights(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2, 2.5)])
        assert degree(g, 1) == 3.5


class TestDegree:
    def test_path_middle_node(self):
        assert degree(path_graph(3), 1) == 2.0

    def test_isolated_node(self):
        g = Graph(2, [], [])
        assert degree(g, 0) == 0.0

    def test_weighted_edge(self):
        g = Graph(2, [0], [1], [2.5])
        assert degree(g, 0) == 2.5

    def test_out_of_range(self):
        with pytest.raises(InputError):
            degree(path_graph(3), 5)


class TestAverageDegree:
    def test_triangle(self):
        assert average_degree(triangle()) == 2.0

    def test_path3(self):
        assert average_degree(path_graph(3)) == pytest.approx(4.0 / 3.0)

    def test_empty_graph_error(self):
        with pytest.raises(InputError):
            average_degree(Graph(0, [], []))


class TestPathDistance:
    def test_same_node_zero(self):
        assert path_distance(path_graph(4), 2, 2) == 0.0

    def test_disconnected_infinity(self):
        g = Graph(4, [0, 2], [1, 3])
        assert path_distance(g, 0, 3) == math.inf

    def test_path_endpoints(self):
        assert path_distance(path_graph(4), 0, 3) == 3.0

    def test_bfs_cutoff_marks_unreachable(self):
        d = bfs_distances(path_graph(5), 0, cutoff=2)
        assert d.tolist() == [0, 1, 2, -1, -1]


class TestNeighborhood:
    def test_radius_zero_is_self(self):
        assert neighborhood(path_graph(4), 1, 0) == {1}

    def test_star_center_radius_one(self):
        g = Graph(5, [0, 0, 0, 0], [1, 2, 3, 4])
        assert neighborhood(g, 0, 1) == {0, 1, 2, 3, 4}

    def test_path_radius_two(self):
        assert neighborhood(path_graph(4), 0, 2) == {0, 1, 2}


class TestNeighborhoodMoment:
    def test_radius_zero_any_power(self):
        assert neighborhood_moment(triangle(), 0, 2.0) == 1.0

    def test_triangle_first_moment(self):
        assert neighborhood_moment(triangle(), 1, 1.0) == 3.0

    def test_path3_second_moment(self):
        assert neighborhood_moment(path_graph(3), 1, 2.0) == pytest.approx(17.0 / 3.0)

    def test_nondecreasing_in_radius(self, rng):
        g = random_connected_graph(20, rng)
        vals = [neighborhood_moment(g, s, 2.0) for s in range(4)]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


class TestConnectedComponents:
    def test_two_triangles(self):
        comps = connected_components(two_triangles())
        assert comps.count == 2
        assert sorted(comps.sizes.tolist()) == [3, 3]

    def test_connected_graph_single_component(self):
        comps = connected_components(path_graph(5))
        assert comps.count == 1
        assert comps.sizes.tolist() == [5]

    def test_giant_is_largest(self):
        g = Graph(4, [0, 1], [1, 2])  # triangle-path plus isolated node 3
        comps = connected_components(g)
        assert comps.giant == 0
        assert comps.sizes[comps.giant] == 3

    def test_sizes_sum_to_n(self, rng):
        g = Graph(10, [0, 2, 5], [1, 3, 6])
        comps = connected_components(g)
        assert comps.sizes.sum() == 10


class TestVolumeBoundaryConductance:
    def test_volume_all_nodes(self):
        g = path_graph(4)
        assert volume(g, range(4)) == 4 * average_degree(g)

    def test_volume_path_prefix(self):
        assert volume(path_graph(4), {0, 1}) == 3.0

    def test_volume_empty_set(self):
        assert volume(path_graph(4), set()) == 0.0

    def test_boundary_of_component_zero(self):
        assert edge_boundary(two_triangles(), {0, 1, 2}) == 0.0

    def test_boundary_path_prefix(self):
        assert edge_boundary(path_graph(4), {0, 1}) == 1.0

    def test_boundary_k4_singleton(self):
        assert edge_boundary(complete_graph(4), {0}) == 3.0

    def test_boundary_complement_symmetry(self):
        g = path_graph(6)
        S = {0, 2, 4}
        comp = set(range(6)) - S
        assert edge_boundary(g, S) == edge_boundary(g, comp)

    def test_conductance_of_component_zero(self):
        assert conductance(two_triangles(), {3, 4, 5}) == 0.0

    def test_conductance_complete_singleton_one(self):
        assert conductance(complete_graph(5), {0}) == 1.0

    def test_conductance_path_prefix(self):
        assert conductance(path_graph(4), {0, 1}) == pytest.approx(1.0 / 3.0)

    def test_conductance_link_free_set_error(self):
        g = Graph(3, [0], [1])
        with pytest.raises(DomainError, match="link-free"):
            conductance(g, {2})


class TestMaxConductance:
    def test_component_partition_zero(self):
        p = Partition(labels=np.array([0, 0, 0, 1, 1, 1]), L=2)
        assert max_conductance(two_triangles(), p) == 0.0

    def test_path4_balanced_split(self):
        p = Partition(labels=np.array([0, 0, 1, 1]), L=2)
        assert max_conductance(path_graph(4), p) == pytest.approx(1.0 / 3.0)

    def test_trivial_partition_zero(self):
        p = Partition(labels=np.zeros(4, dtype=int), L=1)
        assert max_conductance(path_graph(4), p) == 0.0


class TestPartitionValidation:
    def test_unused_label_rejected(self):
        with pytest.raises(InputError):
            Partition(labels=np.array([0, 0, 2]), L=3)

    def test_label_out_of_range_rejected(self):
        with pytest.raises(InputError):
            Partition(labels=np.array([0, 1]), L=1)

    def test_sizes_and_members(self):
        p = Partition(labels=np.array([1, 0, 1]), L=2)
        assert p.sizes.tolist() == [1, 2]
        assert p.members(1).tolist() == [0, 2]


class TestInducedSubgraph:
    def test_keeps_internal_edges_only(self):
        g = path_graph(4)
        sub, ids = induced_subgraph(g, [0, 1, 3])
        assert sub.n == 3
        assert sub.num_edges == 1
        assert ids.tolist() == [0, 1, 3]


class TestEdgeListIO:
    def test_round_trip(self, tmp_path):
        g = two_triangles()
        path = tmp_path / "g.edges"
        write_edge_list(g, path)
        g2, ids = read_edge_list(path)
        assert g2.n == 6
        assert g2.num_edges == g.num_edges
        assert ids.tolist() == list(range(6))

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("# header\n\n0 1\n1 2  # trailing comment\n")
        g, _ = read_edge_list(path)
        assert g.num_edges == 2

    def test_sparse_ids_relabelled(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("10 30\n30 500\n")
        g, ids = read_edge_list(path)
        assert g.n == 3
        assert ids.tolist() == [10, 30, 500]
        assert path_distance(g, 0, 2) == 2.0

    def test_malformed_line_cites_line_number(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("0 1\na b c d\n")
        with pytest.raises(InputError, match=r":2:"):
            read_edge_list(path)

    def test_negative_id_rejected(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("-1 2\n")
        with pytest.raises(InputError, match="nonnegative"):
            read_edge_list(path)

    def test_weighted_round_trip(self, tmp_path):
        g = Graph(2, [0], [1], [2.5])
        path = tmp_path / "g.edges"
        write_edge_list(g, path)
        g2, _ = read_edge_list(path)
        assert degree(g2, 0) == 2.5


# ---------------------------------------------------------------------------
# property tests


@st.composite
def connected_graphs(draw, max_n=30):
    n = draw(st.integers(min_value=2, max_value=max_n))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_connected_graph(n, np.random.default_rng(seed))


@given(connected_graphs())
@settings(max_examples=50, deadline=None)
def test_conductance_in_unit_interval(g):
    rng = np.random.default_rng(g.n)
    S = set(int(x) for x in rng.choice(g.n, size=max(1, g.n // 2), replace=False))
    if volume(g, S) > 0:
        assert 0.0 <= conductance(g, S) <= 1.0


@given(connected_graphs())
@settings(max_examples=50, deadline=None)
def test_boundary_complement_symmetry_property(g):
    rng = np.random.default_rng(g.n + 1)
    S = set(int(x) for x in rng.choice(g.n, size=g.n // 2 + 1, replace=False))
    comp = set(range(g.n)) - S
    assert edge_boundary(g, S) == pytest.approx(edge_boundary(g, comp))


@given(connected_graphs(max_n=12), st.data())
@settings(max_examples=30, deadline=None)
def test_path_distance_metric(g, data):
    i = data.draw(st.integers(0, g.n - 1))
    j = data.draw(st.integers(0, g.n - 1))
    k = data.draw(st.integers(0, g.n - 1))
    dij = path_distance(g, i, j)
    assert dij == path_distance(g, j, i)
    assert dij <= path_distance(g, i, k) + path_distance(g, k, j)
    assert (dij == 0) == (i == j)
