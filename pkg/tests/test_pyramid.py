"""Kron reduction, interpolation and the multiresolution pyramid."""

import numpy as np
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose

import graphsig as gs
from graphsig import exceptions as exc

from oracles import dense_schur


class TestKronReduce:
    def test_path3_closed_form(self):
        L = gs.path(3).L
        R = gs.kron_reduce(L, [0, 2]).toarray()
        assert_allclose(R, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_star_center_elimination(self):
        # eliminating the hub of a unit-weight star wires the leaves into a
        # complete graph of weight 1/degree
        G = gs.comet(tail_length=0, star_degree=4)
        R = gs.kron_reduce(G.L, [1, 2, 3, 4]).toarray()
        expected = np.eye(4) - 0.25 * np.ones((4, 4))
        assert_allclose(R, expected, atol=1e-14)

    def test_matches_dense_schur(self, rng):
        for seed in range(4):
            G = gs.sensor(30 + 5 * seed, seed=seed)
            n = G.N
            kept = np.sort(rng.choice(n, size=n // 2 + 3, replace=False))
            R = gs.kron_reduce(G.L, kept).toarray()
            ref = dense_schur(G.L.toarray(), kept)
            assert_allclose(R, ref, atol=1e-10)

    def test_result_is_a_laplacian(self, rng):
        G = gs.sensor(40, seed=2)
        kept = np.sort(rng.choice(40, size=24, replace=False))
        R = gs.kron_reduce(G.L, kept).toarray()
        assert np.abs(R - R.T).max() == 0
        off = R - np.diag(np.diag(R))
        assert off.max() <= 0
        assert np.abs(R.sum(axis=1)).max() < 1e-9
        assert np.linalg.eigvalsh(R).min() > -1e-10

    def test_kept_validation(self):
        L = gs.path(4).L
        with pytest.raises(exc.EmptyKeptSet):
            gs.kron_reduce(L, [])
        with pytest.raises(exc.IndexOutOfRange):
            gs.kron_reduce(L, [0, 4])
        with pytest.raises(exc.BadParameter):
            gs.kron_reduce(L, [0, 1, 2, 3])

    def test_disconnected_elimination_fails(self):
        W = sp.block_diag([gs.path(2).W, gs.path(2).W], format="csr")
        G = gs.graph_from_weights(W, directed=False)
        with pytest.raises(exc.SingularInteriorBlock):
            gs.kron_reduce(G.L, [0, 1])  # eliminates a whole component


class TestHierarchy:
    def test_structure(self, rng):
        G = gs.sensor(64, seed=3)
        mr = gs.graph_multiresolution(G, 3)
        assert mr.n_levels == 3
        assert len(mr.graphs) == 4
        sizes = mr.level_sizes()
        assert sizes[0] == 64
        assert all(b < a for a, b in zip(sizes, sizes[1:]))
        # the kept side is always at least half of the level
        for level, kept in enumerate(mr.keeps):
            assert kept.size >= sizes[level] // 2
            assert np.array_equal(kept, np.unique(kept))
            assert_allclose(mr.graphs[level + 1].coords,
                            mr.graphs[level].coords[kept], atol=0)

    def test_deterministic(self):
        a = gs.graph_multiresolution(gs.sensor(300, seed=5), 2)
        b = gs.graph_multiresolution(gs.sensor(300, seed=5), 2)
        for ka, kb in zip(a.keeps, b.keeps):
            assert np.array_equal(ka, kb)
        for ga, gb in zip(a.graphs, b.graphs):
            assert np.array_equal(ga.W.toarray(), gb.W.toarray())

    def test_zero_levels(self, rng):
        G = gs.sensor(20, seed=1)
        mr = gs.graph_multiresolution(G, 0)
        assert mr.n_levels == 0 and mr.graphs == [G]
        f = rng.standard_normal(20)
        pyr = gs.pyramid_analysis(mr, f)
        assert pyr.errors == [] and np.array_equal(pyr.coarse, f)
        assert_allclose(gs.pyramid_synthesis(mr, pyr), f, atol=0)

    def test_two_vertex_chain(self):
        mr = gs.graph_multiresolution(gs.path(2), 1)
        assert mr.level_sizes() == [2, 1]
        with pytest.raises(exc.BadParameter):
            gs.graph_multiresolution(gs.path(2), 2)

    def test_requires_combinatorial_undirected_connected(self):
        W = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], float)
        D = gs.graph_from_weights(W, directed=True)
        with pytest.raises(exc.KindMismatch):
            gs.graph_multiresolution(D, 1)
        G = gs.ring(8)
        gs.laplacian(G, "normalized")
        with pytest.raises(exc.KindMismatch):
            gs.graph_multiresolution(G, 1)
        two = gs.graph_from_weights(
            sp.block_diag([gs.ring(3).W, gs.ring(3).W], format="csr"))
        with pytest.raises(exc.NotConnected):
            gs.graph_multiresolution(two, 1)

    def test_parameter_validation(self):
        G = gs.ring(8)
        with pytest.raises(exc.BadParameter):
            gs.graph_multiresolution(G, -1)
        with pytest.raises(exc.BadParameter):
            gs.graph_multiresolution(G, 1, alpha=-0.5)
        with pytest.raises(exc.BadParameter):
            gs.graph_multiresolution(G, 1, epsilon=0.0)

    def test_rebuild_from_keeps(self):
        G1 = gs.sensor(48, seed=7)
        mr = gs.graph_multiresolution(G1, 2, alpha=0.7, epsilon=0.01)
        G2 = gs.sensor(48, seed=7)
        clone = gs.multiresolution_from_keeps(G2, mr.keeps, alpha=0.7,
                                              epsilon=0.01)
        assert clone.level_sizes() == mr.level_sizes()
        for ga, gb in zip(mr.graphs, clone.graphs):
            assert np.array_equal(ga.W.toarray(), gb.W.toarray())


class TestInterpolate:
    def test_exact_on_kept_vertices(self, sensor64, rng):
        kept = np.sort(rng.choice(64, size=30, replace=False))
        vals = rng.standard_normal(30)
        out = gs.interpolate(sensor64, kept, vals)
        assert_allclose(out[kept], vals, atol=1e-9)

    def test_matches_dense_oracle(self, sensor64, rng):
        kept = np.sort(rng.choice(64, size=25, replace=False))
        vals = rng.standard_normal(25)
        eps = 0.005
        out = gs.interpolate(sensor64, kept, vals, epsilon=eps)
        Ld = sensor64.L.toarray() + eps * np.eye(64)
        basis = np.linalg.solve(Ld, np.eye(64)[:, kept])
        coef = np.linalg.solve(basis[kept], vals)
        assert_allclose(out, basis @ coef, atol=1e-8)

    def test_constant_bias_scales_with_epsilon(self, sensor64):
        kept = np.arange(0, 64, 2)
        errs = []
        for eps in (1e-2, 1e-4):
            out = gs.interpolate(sensor64, kept, np.ones(32), epsilon=eps)
            errs.append(np.abs(out - 1.0).max())
        assert errs[0] < 0.1
        assert errs[1] < 0.05 * errs[0]

    def test_matrix_values(self, sensor64, rng):
        kept = np.arange(0, 64, 3)
        vals = rng.standard_normal((kept.size, 4))
        out = gs.interpolate(sensor64, kept, vals)
        assert out.shape == (64, 4)
        assert_allclose(out[kept], vals, atol=1e-9)

    def test_validation(self, sensor64):
        with pytest.raises(exc.BadParameter):
            gs.interpolate(sensor64, [0, 1], [1.0, 2.0], epsilon=-1)
        with pytest.raises(exc.EmptyKeptSet):
            gs.interpolate(sensor64, [], [])
        with pytest.raises(exc.IndexOutOfRange):
            gs.interpolate(sensor64, [0, 64], [1.0, 2.0])
        with pytest.raises(exc.ShapeMismatch):
            gs.interpolate(sensor64, [0, 1], [1.0, 2.0, 3.0])


class TestPyramidTransform:
    def test_perfect_reconstruction(self, rng):
        G = gs.sensor(64, seed=3)
        mr = gs.graph_multiresolution(G, 3)
        for _ in range(5):
            f = rng.standard_normal(64)
            pyr = gs.pyramid_analysis(mr, f)
            assert_allclose(gs.pyramid_synthesis(mr, pyr), f, atol=1e-10)

    def test_reconstruction_with_other_parameters(self, rng):
        G = gs.sensor(48, seed=9)
        for alpha, eps in ((0.0, 0.005), (2.5, 0.05)):
            mr = gs.graph_multiresolution(G, 2, alpha=alpha, epsilon=eps)
            f = rng.standard_normal(48)
            assert_allclose(
                gs.pyramid_synthesis(mr, gs.pyramid_analysis(mr, f)),
                f, atol=1e-10)

    def test_coefficient_layout(self, rng):
        G = gs.sensor(40, seed=4)
        mr = gs.graph_multiresolution(G, 2)
        f = rng.standard_normal(40)
        pyr = gs.pyramid_analysis(mr, f)
        sizes = mr.level_sizes()
        assert pyr.level_sizes == sizes
        assert pyr.coarse.shape == (sizes[-1],)
        assert [e.shape[0] for e in pyr.errors] == sizes[:-1]

    def test_smooth_signal_has_small_errors(self):
        # the pyramid should code a low-frequency signal almost entirely in
        # its coarse part
        G = gs.sensor(64, seed=3)
        gs.compute_fourier_basis(G)
        S = gs.compute_fourier_basis(G)
        f = S.U[:, 1] + 0.5 * S.U[:, 2]
        mr = gs.graph_multiresolution(G, 2)
        pyr = gs.pyramid_analysis(mr, f)
        total = np.linalg.norm(f)
        err_energy = np.sqrt(sum(np.linalg.norm(e) ** 2 for e in pyr.errors))
        assert err_energy < 0.5 * total

    def test_analysis_shape_check(self, rng):
        mr = gs.graph_multiresolution(gs.sensor(20, seed=1), 1)
        with pytest.raises(exc.ShapeMismatch):
            gs.pyramid_analysis(mr, rng.standard_normal(21))
        with pytest.raises(exc.ShapeMismatch):
            gs.pyramid_analysis(mr, rng.standard_normal((20, 2)))

    def test_synthesis_level_validation(self, rng):
        G = gs.sensor(24, seed=6)
        mr = gs.graph_multiresolution(G, 2)
        pyr = gs.pyramid_analysis(mr, rng.standard_normal(24))
        other = gs.graph_multiresolution(gs.sensor(24, seed=8), 2)
        if other.level_sizes() != mr.level_sizes():
            with pytest.raises(exc.LevelMismatch):
                gs.pyramid_synthesis(other, pyr)
        bad = gs.Pyramid(coarse=pyr.coarse[:-1], errors=pyr.errors,
                         level_sizes=pyr.level_sizes)
        with pytest.raises(exc.LevelMismatch):
            gs.pyramid_synthesis(mr, bad)
        bad2 = gs.Pyramid(coarse=pyr.coarse, errors=pyr.errors[:-1],
                          level_sizes=pyr.level_sizes)
        with pytest.raises(exc.LevelMismatch):
            gs.pyramid_synthesis(mr, bad2)
