import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netclust import (
    CapacityError,
    DomainError,
    Graph,
    InputError,
    brute_force_cheeger,
    conductance,
    kmeans,
    max_conductance,
    normalized_laplacian,
    spectral_cluster,
    spectral_embedding,
    spectrum,
)
from netclust.generators import gen_er, gen_rgg
from netclust.spectral import _kmeans_labels

from conftest import (
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    triangle,
    two_triangles,
    two_triangles_bridge,
)


class TestNormalizedLaplacian:
    def test_single_edge_closed_form(self):
        L = normalized_laplacian(Graph(2, [0], [1]))
        assert np.allclose(L, [[1.0, -1.0], [-1.0, 1.0]])
        assert np.allclose(sorted(np.linalg.eigvalsh(L)), [0.0, 2.0])

    def test_triangle_eigenvalues(self):
        L = normalized_laplacian(triangle())
        assert np.allclose(np.linalg.eigvalsh(L), [0.0, 1.5, 1.5])

    def test_sqrt_degree_null_vector(self, rng):
        g = random_connected_graph(15, rng)
        L = normalized_laplacian(g)
        v = np.sqrt(g.degrees)
        assert np.allclose(L @ v, 0.0, atol=1e-12)

    def test_zero_degree_node_named(self):
        g = Graph(3, [0], [1])
        with pytest.raises(DomainError, match="node 2"):
            normalized_laplacian(g)


class TestSpectrum:
    def test_two_components_two_zeros(self):
        report = spectrum(two_triangles())
        assert report.eigenvalues[0] == pytest.approx(0.0, abs=1e-10)
        assert report.eigenvalues[1] == pytest.approx(0.0, abs=1e-10)
        assert report.eigenvalues[2] > 1e-3
        assert report.zero_multiplicity() == 2

    def test_first_eigenvalue_always_zero(self, rng):
        g = random_connected_graph(12, rng)
        assert spectrum(g).eigenvalues[0] == pytest.approx(0.0, abs=1e-9)

    def test_partial_matches_full(self, rng):
        g = random_connected_graph(25, rng)
        full = spectrum(g)
        part = spectrum(g, k=5)
        assert np.allclose(part.eigenvalues, full.eigenvalues[:5], atol=1e-9)

    def test_eigenpair_reconstruction(self, rng):
        g = random_connected_graph(20, rng)
        L = normalized_laplacian(g)
        rep = spectrum(g)
        for idx in range(g.n):
            lhs = L @ rep.eigenvectors[:, idx]
            rhs = rep.eigenvalues[idx] * rep.eigenvectors[:, idx]
            assert np.allclose(lhs, rhs, atol=1e-6)

    def test_iterative_solver_agrees_with_dense(self):
        g = gen_rgg(700, 5.0, 4).graph
        from netclust.graph import connected_components, induced_subgraph

        comps = connected_components(g)
        sub, _ = induced_subgraph(g, np.flatnonzero(comps.labels == comps.giant))
        # n >= 600 with small k routes through the iterative path
        it = spectrum(sub, k=6)
        dense = np.linalg.eigvalsh(normalized_laplacian(sub))[:6]
        assert np.allclose(it.eigenvalues, dense, atol=1e-8)

    def test_k_out_of_range(self):
        with pytest.raises(InputError):
            spectrum(triangle(), k=7)


class TestSpectralEmbedding:
    def test_l1_single_signed_unit_entries(self, rng):
        g = random_connected_graph(10, rng)
        emb = spectral_embedding(spectrum(g), 1)
        vals = emb.positions[:, 0]
        assert np.allclose(np.abs(vals), 1.0)
        assert len(np.unique(np.sign(vals))) == 1

    def test_rows_unit_norm(self, rng):
        g = random_connected_graph(14, rng)
        emb = spectral_embedding(spectrum(g), 3)
        assert np.allclose(np.linalg.norm(emb.positions, axis=1), 1.0)

    def test_two_components_identical_within_component(self):
        emb = spectral_embedding(spectrum(two_triangles()), 2)
        pos = emb.positions
        for grp in ([0, 1, 2], [3, 4, 5]):
            assert np.allclose(pos[grp], pos[grp[0]], atol=1e-6)


class TestKmeans:
    def test_separated_clouds_exact_bipartition(self, rng):
        a = rng.normal(size=(20, 2)) * 0.01
        b = rng.normal(size=(15, 2)) * 0.01 + 100.0
        pts = np.vstack([a, b])
        part = kmeans(pts, 2, seed=0)
        # canonical order: larger cluster first
        assert part.labels[:20].tolist() == [0] * 20
        assert part.labels[20:].tolist() == [1] * 15

    def test_k1_single_cluster(self, rng):
        part = kmeans(rng.normal(size=(10, 3)), 1, seed=0)
        assert part.L == 1 and set(part.labels) == {0}

    def test_k_equals_points_zero_wcss(self, rng):
        pts = rng.normal(size=(6, 2))
        _, _, wcss = _kmeans_labels(pts, 6, seed=0)
        assert wcss == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_duplicate_points_error(self):
        pts = np.zeros((5, 2))
        with pytest.raises(InputError, match="distinct"):
            kmeans(pts, 2, seed=0)

    def test_deterministic_given_seed(self, rng):
        pts = rng.normal(size=(40, 3))
        a = kmeans(pts, 4, seed=9)
        b = kmeans(pts, 4, seed=9)
        assert np.array_equal(a.labels, b.labels)

    def test_invariant_to_input_order(self, rng):
        pts = rng.normal(size=(30, 2))
        perm = rng.permutation(30)
        a = kmeans(pts, 3, seed=5)
        b = kmeans(pts[perm], 3, seed=5)
        assert np.array_equal(a.labels[perm], b.labels)

    def test_wcss_never_increases(self, rng):
        from netclust.spectral import _kmeanspp_init, _lloyd

        pts = rng.normal(size=(50, 2))
        centers = _kmeanspp_init(pts, 5, rng)
        _, _, _, history = _lloyd(pts, centers)
        assert all(a >= b - 1e-9 for a, b in zip(history, history[1:]))


class TestSpectralCluster:
    def test_l1_trivial(self, rng):
        g = random_connected_graph(8, rng)
        part = spectral_cluster(g, 1, seed=0)
        assert part.L == 1

    def test_two_triangles_bridge_recovers_sides(self):
        g = two_triangles_bridge()
        part = spectral_cluster(g, 2, seed=0)
        assert max_conductance(g, part) == pytest.approx(1.0 / 7.0)
        sides = {frozenset(part.members(0).tolist()), frozenset(part.members(1).tolist())}
        assert sides == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}

    def test_disconnected_input_rejected(self):
        with pytest.raises(DomainError, match="connected"):
            spectral_cluster(two_triangles(), 2, seed=0)

    def test_planted_two_blocks_recovered(self):
        # two K6 blocks joined by a single edge
        iu, ju = np.triu_indices(6, k=1)
        u = np.concatenate([iu, iu + 6, [0]])
        v = np.concatenate([ju, ju + 6, [6]])
        g = Graph(12, u, v)
        part = spectral_cluster(g, 2, seed=1)
        assert frozenset(part.members(0).tolist()) in (
            frozenset(range(6)),
            frozenset(range(6, 12)),
        )


class TestBruteForceCheeger:
    def test_two_triangles_k2_zero(self):
        h, part = brute_force_cheeger(two_triangles(), 2)
        assert h == 0.0
        assert max_conductance(two_triangles(), part) == 0.0

    def test_k4_balanced_split(self):
        h, part = brute_force_cheeger(complete_graph(4), 2)
        assert h == pytest.approx(2.0 / 3.0)
        assert sorted(part.sizes.tolist()) == [2, 2]

    def test_c6_two_arcs(self):
        h, part = brute_force_cheeger(cycle_graph(6), 2)
        assert h == pytest.approx(1.0 / 3.0)
        assert sorted(part.sizes.tolist()) == [3, 3]

    def test_capacity_cap(self):
        with pytest.raises(CapacityError):
            brute_force_cheeger(path_graph(15), 2)

    def test_partition_achieves_reported_value(self, rng):
        g = random_connected_graph(8, rng)
        h, part = brute_force_cheeger(g, 3)
        assert max_conductance(g, part) == pytest.approx(h)


# ---------------------------------------------------------------------------
# property tests


@given(st.integers(min_value=2, max_value=60), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_eigenvalues_in_range(n, seed):
    g = random_connected_graph(n, np.random.default_rng(seed))
    vals = spectrum(g).eigenvalues
    assert vals.min() >= -1e-8
    assert vals.max() <= 2.0 + 1e-8


@given(st.integers(min_value=4, max_value=10), st.integers(min_value=0, max_value=10**6),
       st.integers(min_value=2, max_value=3))
@settings(max_examples=30, deadline=None)
def test_cheeger_lower_bound_small_graphs(n, seed, k):
    g = random_connected_graph(n, np.random.default_rng(seed))
    lam = spectrum(g).eigenvalues
    h, _ = brute_force_cheeger(g, k)
    assert lam[k - 1] / 2.0 <= h + 1e-9
