import math

import numpy as np
import pytest

from groundlab.errors import (
    DisconnectedGraph,
    NotEigenvector,
    NotLaplacian,
    NotStochastic,
    ZeroDegreeNode,
)
from groundlab.paulis import OperatorSum, StateVector, realize_dense
from groundlab.walks import (
    Graph,
    build_generators,
    figure_walk_graph,
    gibbs_density,
    google_matrix,
    is_generalized_laplacian,
    log_partition,
    long_time_average,
    pagerank_ground,
    pagerank_hamiltonian,
    pagerank_power_iteration,
    phase_estimate,
    phase_readout,
    quantum_evolve,
    spectral_entropy,
    stationary_state,
    stochastic_evolve,
    time_averaged_probabilities,
)


def random_connected_laplacian(rng, n):
    a = np.triu(rng.uniform(0.2, 1.5, (n, n)) * (rng.random((n, n)) < 0.5), 1)
    a = a + a.T
    for i in range(n):
        j = (i + 1) % n
        a[i, j] += 0.3
        a[j, i] = a[i, j]
    np.fill_diagonal(a, 0.0)
    return np.diag(a.sum(axis=1)) - a, a


class TestGenerators:
    def test_two_path_laplacian(self):
        g = Graph.from_edges(2, [(0, 1)])
        gen = build_generators(g)
        assert np.allclose(gen.laplacian, [[1, -1], [-1, 1]])

    def test_five_node_matrices(self):
        gen = build_generators(figure_walk_graph())
        assert np.allclose(gen.degree, [2, 2, 3, 3, 2])
        want_lap = np.array([
            [2, -1, 0, -1, 0],
            [-1, 2, -1, 0, 0],
            [0, -1, 3, -1, -1],
            [-1, 0, -1, 3, -1],
            [0, 0, -1, -1, 2],
        ], dtype=float)
        assert np.allclose(gen.laplacian, want_lap)
        assert np.allclose(gen.stochastic.sum(axis=0), 0.0, atol=1e-12)
        assert np.allclose(gen.quantum, gen.quantum.T)

    def test_complete_graph(self):
        g = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
        gen = build_generators(g)
        assert np.allclose(gen.degree, [2, 2, 2])
        assert np.allclose(gen.laplacian.sum(axis=1), 0.0)

    def test_disconnected_rejected(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(DisconnectedGraph):
            build_generators(g)

    def test_zero_degree_rejected(self):
        with pytest.raises((ZeroDegreeNode, DisconnectedGraph)):
            build_generators(Graph(np.zeros((3, 3))))

    def test_s_q_isospectral(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            _lap, a = random_connected_laplacian(rng, int(rng.integers(3, 9)))
            gen = build_generators(Graph(a))
            s_vals = np.sort(np.linalg.eigvals(gen.stochastic).real)
            q_vals = np.sort(np.linalg.eigvalsh(gen.quantum))
            assert np.abs(s_vals - q_vals).max() < 1e-10

    def test_eigenvector_correspondence(self):
        # (ε, φ) of Q gives S (D^{1/2} φ) = ε (D^{1/2} φ)
        gen = build_generators(figure_walk_graph())
        vals, vecs = np.linalg.eigh(gen.quantum)
        d_half = np.sqrt(gen.degree)
        for k in range(gen.n):
            candidate = d_half * vecs[:, k]
            residual = gen.stochastic @ candidate - vals[k] * candidate
            assert np.abs(residual).max() < 1e-9

    def test_graph_formats_round_trip(self):
        g = figure_walk_graph()
        back = Graph.from_json_dict(g.to_json_dict())
        assert np.allclose(back.adjacency, g.adjacency)
        text = "\n".join(f"{i} {j} {w:.3f}"
                         for i in range(5) for j in range(i + 1, 5)
                         if (w := g.adjacency[i, j]))
        assert np.allclose(Graph.from_text(text).adjacency, g.adjacency)


class TestStationary:
    def test_figure_graph_distribution(self):
        gen = build_generators(figure_walk_graph())
        assert np.abs(stationary_state(gen) - [1 / 6, 1 / 6, 1 / 4, 1 / 4, 1 / 6]).max() < 1e-12

    def test_regular_graph_uniform(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        gen = build_generators(g)
        assert np.allclose(stationary_state(gen), 0.25)

    def test_annihilated_by_generator(self):
        gen = build_generators(figure_walk_graph())
        assert np.abs(gen.stochastic @ stationary_state(gen)).max() < 1e-10

    def test_long_time_limit(self):
        gen = build_generators(figure_walk_graph())
        p = stochastic_evolve(gen, np.eye(5)[0], 50.0)
        assert np.abs(p - stationary_state(gen)).max() < 1e-6


class TestLongTimeAverage:
    def test_ground_start_gives_pi(self):
        gen = build_generators(figure_walk_graph())
        vals, vecs = np.linalg.eigh(gen.quantum)
        lta = long_time_average(gen, vecs[:, 0].astype(complex))
        assert lta.eta == pytest.approx(0.0, abs=1e-12)
        assert np.abs(lta.probabilities - lta.stationary).max() < 1e-10

    def test_orthogonal_start_gives_omega(self):
        gen = build_generators(figure_walk_graph())
        vals, vecs = np.linalg.eigh(gen.quantum)
        lta = long_time_average(gen, vecs[:, 2].astype(complex))
        assert lta.eta == pytest.approx(1.0)
        assert np.abs(lta.probabilities - lta.omega).max() < 1e-12

    def test_decomposition_identity(self):
        gen = build_generators(figure_walk_graph())
        rng = np.random.default_rng(3)
        amps = rng.normal(size=5) + 1j * rng.normal(size=5)
        amps /= np.linalg.norm(amps)
        lta = long_time_average(gen, amps)
        recon = (1 - lta.eta) * lta.stationary + lta.eta * lta.omega
        assert np.abs(recon - lta.probabilities).max() < 1e-10
        assert lta.omega.sum() == pytest.approx(1.0, abs=1e-9)

    def test_matches_time_integration(self):
        gen = build_generators(figure_walk_graph())
        start = np.eye(5)[0].astype(complex)
        lta = long_time_average(gen, start)
        numeric = time_averaged_probabilities(gen, start, total_time=1e4, dt=0.05)
        assert np.abs(numeric - lta.probabilities).max() < 2e-3

    def test_quantum_cosine_curve(self):
        g = Graph.from_edges(2, [(0, 1)])
        gen = build_generators(g)
        start = np.array([1.0, 0.0], dtype=complex)
        for t in (0.3, 1.0, 2.2):
            psi = quantum_evolve(gen, start, t)
            assert abs(psi[0]) ** 2 == pytest.approx((1 + math.cos(2 * t)) / 2, abs=1e-12)


class TestSpectralEntropy:
    def test_beta_zero_maximal(self):
        lap, _ = random_connected_laplacian(np.random.default_rng(0), 6)
        assert spectral_entropy(lap, 0.0) == pytest.approx(math.log2(6))

    def test_large_beta_vanishes(self):
        lap, _ = random_connected_laplacian(np.random.default_rng(1), 5)
        assert spectral_entropy(lap, 500.0) < 1e-6

    def test_bounds(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            lap, _ = random_connected_laplacian(rng, int(rng.integers(3, 10)))
            beta = float(rng.uniform(0.05, 5.0))
            s = spectral_entropy(lap, beta)
            assert -1e-12 <= s <= math.log2(lap.shape[0]) + 1e-12

    def test_rejects_non_laplacian(self):
        with pytest.raises(NotLaplacian):
            spectral_entropy(np.array([[1.0, 0.5], [0.5, 1.0]]), 1.0)
        assert not is_generalized_laplacian(np.array([[1.0, -1.0], [-0.5, 0.5]]))

    def test_perron_frobenius_structure(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            lap, _ = random_connected_laplacian(rng, int(rng.integers(3, 10)))
            vals, vecs = np.linalg.eigh(lap)
            assert abs(vals[0]) < 1e-9
            assert vals[1] > 1e-9
            ground = vecs[:, 0]
            ground = ground if ground.sum() > 0 else -ground
            assert ground.min() > 0


class TestPageRank:
    def test_symmetric_pair(self):
        g = google_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0)
        assert np.allclose(pagerank_ground(g), [0.5, 0.5])

    def test_chain_with_damping(self):
        link = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
        g = google_matrix(link, 0.85)
        assert np.abs(pagerank_ground(g) - pagerank_power_iteration(g)).max() < 1e-8

    def test_dangling_without_damping(self):
        with pytest.raises(NotStochastic):
            pagerank_hamiltonian(np.array([[0.0, 0.0], [1.0, 0.0]]))
        g = google_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]), 0.85)
        assert np.abs(g.sum(axis=0) - 1.0).max() < 1e-12

    def test_hamiltonian_is_psd(self):
        link = np.array([[0, 1, 1], [1, 0, 0], [1, 1, 0]], dtype=float)
        h = pagerank_hamiltonian(google_matrix(link, 0.85))
        assert np.linalg.eigvalsh(h).min() > -1e-12


class TestPhaseEstimation:
    def test_zero_eigenvalue_flat_curve(self):
        h = OperatorSum(1, [(1.0, "Z"), (-1.0, "Z")])  # zero operator
        h = OperatorSum(1)
        probs = phase_readout(h, StateVector.basis(1, 0), np.linspace(0.1, 3.0, 7))
        assert np.abs(probs - 1.0).max() < 1e-12

    def test_z_on_one_cosine(self):
        h = OperatorSum(1, [(1.0, "Z")])
        times = np.linspace(0.2, 3.0, 9)
        probs = phase_readout(h, StateVector.basis(1, 1), times)
        assert np.abs(probs - 0.5 * (1 + np.cos(times))).max() < 1e-12

    def test_recovers_signed_eigenvalue(self):
        h = OperatorSum(1, [(1.0, "Z")])
        assert phase_estimate(h, StateVector.basis(1, 1)) == pytest.approx(-1.0, abs=1e-3)
        assert phase_estimate(h, StateVector.basis(1, 0)) == pytest.approx(1.0, abs=1e-3)

    def test_random_diagonal_three_qubits(self):
        rng = np.random.default_rng(5)
        h = OperatorSum(3)
        for _ in range(4):
            z = int(rng.integers(1, 8))
            h.add(float(rng.normal()), (0, z))
        diag = np.diag(realize_dense(h)).real
        for idx in range(8):
            est = phase_estimate(h, StateVector.basis(3, idx))
            assert est == pytest.approx(diag[idx], abs=1e-3)

    def test_rejects_non_eigenvector(self):
        h = OperatorSum(1, [(1.0, "Z")])
        plus = StateVector(1, np.array([1, 1], dtype=complex) / math.sqrt(2))
        with pytest.raises(NotEigenvector):
            phase_estimate(h, plus)
