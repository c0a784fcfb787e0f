"""Tests for cluster construction, nullifiers, and the inseparability check."""

import numpy as np
import pytest

from cvmbqc.cluster import (
    ClusterGraph,
    cluster_unitary,
    default_two_node_q,
    generate_cluster,
    min_squeezing_threshold,
    nullifiers,
    unitary_to_symplectic,
    vlf_two_node_check,
)
from cvmbqc.quadrature import (
    embed,
    expr_covariance,
    is_symplectic,
    phase_rotation,
    symmetric_beam_splitter,
    x_quad,
    y_quad,
)


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_graph(rng, n):
    adj = np.triu((rng.random((n, n)) < 0.5).astype(int), 1)
    return ClusterGraph(adj + adj.T)


class TestGraphValidation:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            ClusterGraph(np.array([[0, 1], [0, 0]]))

    def test_rejects_diagonal(self):
        with pytest.raises(ValueError, match="diagonal"):
            ClusterGraph(np.array([[1, 0], [0, 0]]))

    def test_rejects_weights(self):
        with pytest.raises(ValueError, match="0 or 1"):
            ClusterGraph(np.array([[0, 2], [2, 0]]))

    def test_from_text_rows_and_semicolons(self):
        g1 = ClusterGraph.from_text("0 1\n1 0")
        g2 = ClusterGraph.from_text("0 1; 1 0")
        np.testing.assert_array_equal(g1.adjacency, g2.adjacency)


class TestClusterUnitary:
    def test_two_node_with_default_q(self):
        U = cluster_unitary(ClusterGraph.two_node(), default_two_node_q())
        expected = np.array([[1, -1j], [1j, -1]]) / np.sqrt(2)
        np.testing.assert_allclose(U, expected, atol=1e-14)

    def test_two_node_with_identity_q(self):
        U = cluster_unitary(ClusterGraph.two_node(), np.eye(2))
        expected = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
        np.testing.assert_allclose(U, expected, atol=1e-14)

    def test_edgeless_identity(self):
        U = cluster_unitary(ClusterGraph(np.zeros((3, 3), dtype=int)), np.eye(3))
        np.testing.assert_allclose(U, np.eye(3), atol=1e-14)

    def test_unitary_for_random_graphs(self):
        rng = np.random.default_rng(2)
        for n in range(1, 9):
            for _ in range(5):
                U = cluster_unitary(random_graph(rng, n), random_orthogonal(rng, n))
                assert np.max(np.abs(U @ U.conj().T - np.eye(n))) < 1e-12

    def test_rejects_non_orthogonal_q(self):
        with pytest.raises(ValueError, match="orthogonal"):
            cluster_unitary(ClusterGraph.two_node(), np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestUnitaryToSymplectic:
    def test_identity(self):
        np.testing.assert_array_equal(unitary_to_symplectic(np.eye(2)), np.eye(4))

    def test_single_mode_quarter_turn(self):
        S = unitary_to_symplectic(np.diag([1j, 1.0]))
        expected = embed(phase_rotation(np.pi / 2), [0], 2)
        np.testing.assert_allclose(S, expected, atol=1e-15)

    def test_two_node_factorization(self):
        # the two-node map splits into quarter-turn, beam splitter, back-turn
        U = cluster_unitary(ClusterGraph.two_node(), default_two_node_q())
        S = unitary_to_symplectic(U)
        factored = (embed(phase_rotation(-np.pi / 2), [0], 2)
                    @ symmetric_beam_splitter()
                    @ embed(phase_rotation(np.pi / 2), [0], 2))
        np.testing.assert_allclose(S, factored, atol=1e-14)

    def test_result_symplectic_and_orthogonal(self):
        rng = np.random.default_rng(8)
        for n in (2, 3, 5):
            U = cluster_unitary(random_graph(rng, n), random_orthogonal(rng, n))
            S = unitary_to_symplectic(U)
            assert is_symplectic(S)
            np.testing.assert_allclose(S @ S.T, np.eye(2 * n), atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            unitary_to_symplectic(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestNullifiers:
    def test_two_node(self):
        n1, n2 = nullifiers(ClusterGraph.two_node())
        assert n1 == y_quad(0) - x_quad(1)
        assert n2 == y_quad(1) - x_quad(0)

    def test_edgeless(self):
        exprs = nullifiers(ClusterGraph(np.zeros((3, 3), dtype=int)))
        assert list(exprs) == [y_quad(0), y_quad(1), y_quad(2)]

    def test_three_chain(self):
        n1, n2, n3 = nullifiers(ClusterGraph.chain(3))
        assert n1 == y_quad(0) - x_quad(1)
        assert n2 == y_quad(1) - x_quad(0) - x_quad(2)
        assert n3 == y_quad(2) - x_quad(1)


class TestSqueezingThreshold:
    def test_two_node_is_one_fourth(self):
        assert min_squeezing_threshold(ClusterGraph.two_node()) == 0.25

    def test_three_chain(self):
        assert min_squeezing_threshold(ClusterGraph.chain(3)) == pytest.approx(0.2)

    def test_four_star(self):
        assert min_squeezing_threshold(ClusterGraph.star(4)) == pytest.approx(1 / 6)

    def test_edgeless_undefined(self):
        with pytest.raises(ValueError, match="threshold undefined"):
            min_squeezing_threshold(ClusterGraph(np.zeros((2, 2), dtype=int)))


class TestGenerateCluster:
    def test_vacuum_sources_fail_criterion(self):
        state = generate_cluster([0.25, 0.25], ClusterGraph.two_node())
        res = vlf_two_node_check(state)
        assert res.nullifier_sum == pytest.approx(1.0, abs=1e-12)
        assert not res.entangled

    def test_sum_tracks_four_v(self):
        # abs tolerance 1e-10: cancellation residue scales with the
        # anti-squeezed variance 1/(16 v), large at the smallest v
        for v in (0.24, 0.125, 0.06, 0.01, 1e-6):
            state = generate_cluster([v, v], ClusterGraph.two_node())
            res = vlf_two_node_check(state)
            assert res.nullifier_sum == pytest.approx(4 * v, abs=1e-10)
            assert res.entangled == (v < 0.125)

    def test_boundary_is_strict(self):
        state = generate_cluster([0.125, 0.125], ClusterGraph.two_node())
        res = vlf_two_node_check(state)
        assert res.nullifier_sum == pytest.approx(0.5, abs=1e-14)
        assert not res.entangled

    def test_rejects_nonpositive_variance(self):
        with pytest.raises(ValueError, match="positive"):
            generate_cluster([0.1, 0.0], ClusterGraph.two_node())

    def test_nullifier_variances_independent_of_q(self):
        # equally squeezed sources: any orthogonal freedom leaves the
        # nullifier variance vector unchanged
        rng = np.random.default_rng(4)
        for n in (2, 3, 5):
            graph = ClusterGraph.chain(n)
            v = 0.04
            exprs = nullifiers(graph)
            reference = None
            for _ in range(6):
                q = random_orthogonal(rng, n)
                state = generate_cluster([v] * n, graph, q)
                variances = np.diag(expr_covariance(exprs, state.cov))
                if reference is None:
                    reference = variances
                np.testing.assert_allclose(variances, reference, atol=1e-10)

    def test_nullifier_sum_monotone_in_source_variance(self):
        graph = ClusterGraph.chain(3)
        exprs = nullifiers(graph)

        def total(vs):
            state = generate_cluster(vs, graph, np.eye(3))
            return float(np.trace(expr_covariance(exprs, state.cov)))

        base = [0.05, 0.08, 0.03]
        t0 = total(base)
        for i in range(3):
            bumped = list(base)
            bumped[i] += 0.04
            assert total(bumped) > t0

    def test_vlf_rejects_bad_pair(self):
        state = generate_cluster([0.1, 0.1], ClusterGraph.two_node())
        with pytest.raises(ValueError, match="node pair"):
            vlf_two_node_check(state, (0, 0))
        with pytest.raises(ValueError, match="node pair"):
            vlf_two_node_check(state, (0, 5))
