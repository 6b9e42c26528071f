import json

import numpy as np
import pytest

from netclust import (
    InputError,
    average_degree,
    connected_components,
    gen_configuration,
    gen_er,
    gen_rcm,
    gen_rgg,
    gen_sbm,
    path_distance,
)


def edge_key_set(g):
    u, v, _ = g.edge_array()
    return set(zip(u.tolist(), v.tolist()))


class TestDeterminism:
    @pytest.mark.parametrize(
        "make",
        [
            lambda s: gen_rgg(200, 5.0, s).graph,
            lambda s: gen_rcm(200, s).graph,
            lambda s: gen_er(200, 5.0, s).graph,
            lambda s: gen_sbm(200, 4, 0.2, 0.01, s).graph,
            lambda s: gen_configuration([2] * 50 + [3, 3], s).graph,
        ],
        ids=["rgg", "rcm", "er", "sbm", "configuration"],
    )
    def test_same_seed_same_graph(self, make):
        assert edge_key_set(make(42)) == edge_key_set(make(42))

    def test_different_seeds_differ(self):
        assert edge_key_set(gen_er(200, 5.0, 1).graph) != edge_key_set(
            gen_er(200, 5.0, 2).graph
        )


class TestRgg:
    def test_mean_degree_near_target(self):
        degs = [average_degree(gen_rgg(1000, 5.0, s).graph) for s in range(10)]
        # boundary effects pull slightly below the target
        assert 4.0 < np.mean(degs) < 5.2

    def test_positions_shape_and_range(self):
        gg = gen_rgg(100, 5.0, 0)
        assert gg.positions.shape == (100, 2)
        assert gg.positions.min() >= 0.0 and gg.positions.max() <= 1.0

    def test_links_respect_radius(self):
        gg = gen_rgg(150, 5.0, 3)
        r = gg.params["radius"]
        u, v, _ = gg.graph.edge_array()
        dist = np.linalg.norm(gg.positions[u] - gg.positions[v], axis=1)
        assert dist.max() <= r + 1e-12

    def test_rejects_bad_args(self):
        with pytest.raises(InputError):
            gen_rgg(1, 5.0, 0)
        with pytest.raises(InputError):
            gen_rgg(10, -1.0, 0)


class TestRcm:
    def test_mean_degree_near_five(self):
        degs = [average_degree(gen_rcm(1000, s).graph) for s in range(10)]
        assert abs(np.mean(degs) - 5.0) < 0.5

    def test_distant_links_rare_but_possible(self):
        # unlike the geometric model, some links exceed the length scale
        gg = gen_rcm(800, 0)
        r = gg.params["radius"]
        u, v, _ = gg.graph.edge_array()
        dist = np.linalg.norm(gg.positions[u] - gg.positions[v], axis=1)
        assert (dist > 3 * r).any()
        assert (dist > 3 * r).mean() < 0.5

    def test_link_probability_decays_with_distance(self):
        # empirical link frequency for near vs far pairs over several draws
        near, far = [], []
        for s in range(5):
            gg = gen_rcm(400, s)
            r = gg.params["radius"]
            X = gg.positions
            iu, ju = np.triu_indices(400, k=1)
            dist = np.linalg.norm(X[iu] - X[ju], axis=1)
            linked = np.zeros(len(iu), dtype=bool)
            keys = edge_key_set(gg.graph)
            for t, (a, b) in enumerate(zip(iu, ju)):
                if (int(a), int(b)) in keys:
                    linked[t] = True
            near.append(linked[dist < r].mean())
            far.append(linked[dist > 5 * r].mean())
        assert np.mean(near) > 10 * np.mean(far)


class TestEr:
    def test_edge_count_binomial_band(self):
        n, kappa = 1000, 5.0
        counts = [gen_er(n, kappa, s).graph.num_edges for s in range(10)]
        mean_expected = (n - 1) * kappa / 2.0  # n(n-1)/2 * kappa/n
        sd = np.sqrt(mean_expected)  # binomial sd, p small
        assert abs(np.mean(counts) - mean_expected) < 4 * sd / np.sqrt(10)

    def test_rejects_bad_kappa(self):
        with pytest.raises(InputError):
            gen_er(10, 0.0, 0)
        with pytest.raises(InputError):
            gen_er(10, 10.0, 0)


class TestSbm:
    def test_zero_cross_probability_gives_components(self):
        g = gen_sbm(120, 4, 0.5, 0.0, 0).graph
        comps = connected_components(g)
        assert comps.count == 4
        assert sorted(comps.sizes.tolist()) == [30, 30, 30, 30]

    def test_equal_probabilities_match_er_rate(self):
        # p_in == p_out collapses to a homogeneous model
        n, p = 600, 0.01
        counts = [gen_sbm(n, 3, p, p, s).graph.num_edges for s in range(10)]
        expected = n * (n - 1) / 2 * p
        assert abs(np.mean(counts) - expected) < 4 * np.sqrt(expected) / np.sqrt(10)

    def test_block_structure_in_edge_rates(self):
        gg = gen_sbm(300, 3, 0.2, 0.01, 5)
        u, v, _ = gg.graph.edge_array()
        same = gg.types[u] == gg.types[v]
        # within-block pairs are a third of all pairs but carry most edges
        assert same.mean() > 0.8

    def test_blocks_must_divide_n(self):
        with pytest.raises(InputError):
            gen_sbm(10, 3, 0.2, 0.01, 0)


class TestConfiguration:
    def test_all_degree_two_gives_cycles(self):
        # seed chosen so no stubs get dropped; every component is a cycle
        g = gen_configuration([2] * 40, 1).graph
        assert np.all(g.degrees == 2.0)
        comps = connected_components(g)
        assert all(s >= 3 for s in comps.sizes)

    def test_dropped_stubs_reported(self):
        gg = gen_configuration([2] * 40, 0)
        assert gg.info["dropped_stubs"] == 2
        assert np.all(gg.graph.degrees <= 2.0)

    def test_odd_sum_rejected(self):
        with pytest.raises(InputError, match="even"):
            gen_configuration([2, 2, 2, 3], 0)

    def test_degree_bounds_rejected(self):
        with pytest.raises(InputError):
            gen_configuration([-1, 1], 0)
        with pytest.raises(InputError):
            gen_configuration([4, 1, 1, 1], 0)

    def test_realized_degrees_near_target(self):
        rng = np.random.default_rng(0)
        degs = rng.poisson(5.0, size=500)
        if degs.sum() % 2:
            degs[0] += 1
        degs = np.minimum(degs, 499)
        gg = gen_configuration(degs, 7)
        realized = gg.graph.degrees
        # erased variant: realized never exceeds target, drops are rare
        assert np.all(realized <= degs)
        assert gg.info["realized_edges"] >= 0.99 * gg.info["target_edges"]

    def test_no_multi_edges_or_self_links(self):
        gg = gen_configuration([4] * 30, 3)
        u, v, _ = gg.graph.edge_array()
        assert np.all(u < v)  # canonical orientation, no self-links
        assert len(set(zip(u.tolist(), v.tolist()))) == len(u)


class TestExports:
    def test_metadata_json(self, tmp_path):
        gg = gen_er(50, 3.0, 9)
        out = tmp_path / "meta.json"
        gg.export_metadata(out)
        data = json.loads(out.read_text())
        assert data["schema"] == "netclust-genmeta-v1"
        assert data["model"] == "er"
        assert data["n"] == 50
        assert data["seed"] == 9
        assert data["edges"] == gg.graph.num_edges

    def test_positions_csv_round_trip(self, tmp_path):
        gg = gen_rgg(20, 5.0, 1)
        out = tmp_path / "pos.csv"
        gg.export_positions_csv(out)
        lines = out.read_text().splitlines()
        assert lines[0] == "# netclust positions v1"
        assert lines[1] == "node,x,y"
        parsed = np.array(
            [[float(tok) for tok in line.split(",")[1:]] for line in lines[2:]]
        )
        assert np.array_equal(parsed, gg.positions)

    def test_positions_missing_for_er(self, tmp_path):
        gg = gen_er(10, 3.0, 0)
        with pytest.raises(InputError, match="positions"):
            gg.export_positions_csv(tmp_path / "pos.csv")
