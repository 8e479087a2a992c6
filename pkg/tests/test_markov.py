import json

import numpy as np
import pytest
import scipy.linalg

from contraction_lab import markov
from contraction_lab.errors import (
    DisconnectedGraph,
    NegativeEntry,
    NonFinite,
    NonSquare,
    NonUniqueStationary,
    RowSumViolation,
    ZeroMass,
    ZeroPushedMass,
)


@pytest.mark.parametrize(
    "raw, err",
    [
        ([[0.5, 0.5]], NonSquare),
        ([[1.2, -0.2], [0.5, 0.5]], NegativeEntry),
        ([[0.5, 0.6], [0.5, 0.5]], RowSumViolation),
        ([[np.nan, 1.0], [0.5, 0.5]], NonFinite),
    ],
)
def test_validation_errors(raw, err):
    with pytest.raises(err):
        markov.validate_kernel(raw)


def test_stationary_of_binary_channel():
    lam, kappa = 0.3, 0.1
    pi = markov.stationary_distribution(markov.general_binary(lam, kappa))
    np.testing.assert_allclose(pi, [kappa / (lam + kappa), lam / (lam + kappa)], atol=1e-14)


def test_stationary_rejects_reducible_kernel():
    with pytest.raises(NonUniqueStationary):
        markov.stationary_distribution(np.eye(3))


def test_dual_of_doubly_stochastic_at_uniform_is_transpose():
    L = np.array([[0.2, 0.1, 0.7], [0.3, 0.4, 0.3], [0.5, 0.5, 0.0]])
    np.testing.assert_allclose(markov.dual_kernel(L, np.full(3, 1 / 3)), L.T, atol=1e-15)


def test_dual_kernel_is_stochastic():
    K = markov.random_stochastic(5, 3)
    mu = np.random.default_rng(1).dirichlet(np.ones(5))
    Ks = markov.dual_kernel(K, mu)
    np.testing.assert_allclose(Ks.sum(axis=1), 1.0, atol=1e-12)
    # mu K K* = mu
    np.testing.assert_allclose((mu @ K) @ Ks, mu, atol=1e-12)


def test_densities_errors():
    K = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ZeroPushedMass):
        markov.densities(K, [0.5, 0.5])
    with pytest.raises(ZeroMass):
        markov.densities(markov.bsc(0.2), [1.0, 0.0])


@pytest.mark.parametrize("t", [0.0, 0.3, 2.0, 17.5])
def test_semigroup_matches_scipy_expm(t):
    K = markov.random_stochastic(4, 11)
    H = markov.semigroup(K, t).matrix
    np.testing.assert_allclose(H, scipy.linalg.expm(-t * (np.eye(4) - K)), atol=1e-13)
    np.testing.assert_allclose(H.sum(axis=1), 1.0, atol=1e-13)


def test_semigroup_law():
    K = markov.random_stochastic(3, 5)
    a, b = markov.semigroup(K, 0.7).matrix, markov.semigroup(K, 1.1).matrix
    np.testing.assert_allclose(a @ b, markov.semigroup(K, 1.8).matrix, atol=1e-13)


def test_graph_walk_path_graph():
    g = markov.Graph.path(3)
    K = markov.graph_walk(g, 0.5)
    expected = np.array([[0.5, 0.5, 0.0], [0.25, 0.5, 0.25], [0.0, 0.5, 0.5]])
    np.testing.assert_allclose(K, expected)
    pi = markov.graph_stationary(g)
    np.testing.assert_allclose(pi @ K, pi, atol=1e-15)
    np.testing.assert_allclose(pi, [0.25, 0.5, 0.25])


def test_disconnected_graph_rejected():
    with pytest.raises(DisconnectedGraph):
        markov.graph_walk(markov.Graph(4, ((0, 1), (2, 3))), 0.3)


def test_complete_graph_degrees():
    g = markov.Graph.complete(5)
    assert len(g.edges) == 10
    assert np.all(g.degrees() == 4)


def test_random_kernel_is_seeded():
    a = markov.random_stochastic(5, 7)
    np.testing.assert_array_equal(a, markov.random_stochastic(5, 7))
    assert not np.array_equal(a, markov.random_stochastic(5, 8))
    markov.validate_kernel(markov.random_stochastic(5, 7, rows="uniform"))


def test_kernel_file_round_trip(tmp_path):
    K = markov.random_stochastic(3, 2)
    path = tmp_path / "k.json"
    path.write_text(markov.dump_kernel(K))
    K2, mu = markov.load_kernel_file(path)
    np.testing.assert_array_equal(K, K2)
    np.testing.assert_allclose(mu, markov.stationary_distribution(K))
    path.write_text(json.dumps({"matrix": K.tolist(), "mu": [0.5, 0.5]}))
    with pytest.raises(ValueError):
        markov.load_kernel_file(path)


def test_t_step():
    K = markov.bsc(0.2)
    np.testing.assert_allclose(markov.t_step(K, 3), K @ K @ K)
    np.testing.assert_array_equal(markov.t_step(K, 0), np.eye(2))
    with pytest.raises(ValueError):
        markov.t_step(K, 1.5)
