"""Randomised invariants, 1000 derandomised cases each."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from contraction_lab import markov
from contraction_lab.contraction import centred_l2_norm, exact_l2_contraction
from contraction_lab.orlicz import (
    Power,
    amemiya_norm,
    divergence,
    holder_product_bound,
    luxemburg_norm,
    orlicz_norm,
)
from strategies import CONVEX_YOUNG, SEEDS, SIZES, functions, kernels, prob_vectors

N = settings(max_examples=1000)
DIVERGENCES = [("kl", None), ("chi2", None), ("tv", None), ("hellinger", 1.5), ("hellinger", 3.0), ("h_alpha", 2.5)]


@st.composite
def chain_inputs(draw):
    m = draw(SIZES)
    return draw(kernels(m)), draw(prob_vectors(m)), draw(prob_vectors(m))


@N
@given(chain_inputs(), st.sampled_from(DIVERGENCES))
def test_data_processing_inequality(inputs, div):
    K, mu, nu = inputs
    kind, alpha = div
    before = divergence(nu, mu, kind, alpha)
    after = divergence(nu @ K, mu @ K, kind, alpha)
    assert after <= before * (1 + 1e-9) + 1e-12


@N
@given(st.data(), CONVEX_YOUNG)
def test_generalized_holder(data, psi):
    m = data.draw(SIZES)
    mu = data.draw(prob_vectors(m))
    u = np.abs(data.draw(functions(m)))
    v = np.abs(data.draw(functions(m)))
    lhs, rhs = holder_product_bound(u, v, mu, psi)
    assert lhs <= rhs * (1 + 1e-7) + 1e-12


@N
@given(
    CONVEX_YOUNG,
    st.floats(min_value=1e-3, max_value=5.0),
    st.floats(min_value=0.0, max_value=20.0),
)
def test_fenchel_young(psi, lam, y):
    lam = min(lam, psi.domain_hint)
    assert lam * y <= float(psi(lam)) + float(psi.conjugate(y)) + 1e-9 * (1 + lam * y)


@N
@given(st.data(), st.sampled_from([Power(1.2), Power(2), Power(4), Power(30)]), st.sampled_from("AL"))
def test_stationary_kernel_is_a_contraction(data, psi, flavor):
    m = data.draw(SIZES)
    K = data.draw(kernels(m))
    pi = markov.stationary_distribution(K)
    f = data.draw(functions(m))
    assert orlicz_norm(K @ f, pi, psi, flavor) <= orlicz_norm(f, pi, psi, flavor) * (1 + 1e-9) + 1e-12
    assert exact_l2_contraction(K, pi) <= 1 + 1e-9


@N
@given(st.data())
def test_adjointness(data):
    m = data.draw(SIZES)
    K = data.draw(kernels(m))
    mu = data.draw(prob_vectors(m))
    h, f = data.draw(functions(m)), data.draw(functions(m))
    Kstar = markov.dual_kernel(K, mu)
    left = np.dot(mu, (K @ h) * f)
    right = np.dot(mu @ K, h * (Kstar @ f))
    assert math.isclose(left, right, rel_tol=1e-9, abs_tol=1e-9 * (1 + np.abs(h).max() * np.abs(f).max()))


@N
@given(chain_inputs())
def test_dual_kernel_maps_density_to_density(inputs):
    K, mu, nu = inputs
    Kstar = markov.dual_kernel(K, mu)
    expected = (nu @ K) / (mu @ K)
    np.testing.assert_allclose(Kstar @ (nu / mu), expected, rtol=1e-9)
    dens = markov.densities(K, mu)
    np.testing.assert_allclose(Kstar / mu[None, :], dens.dual, rtol=1e-9)


@N
@given(st.data(), st.integers(min_value=1, max_value=8))
def test_power_recursion(data, t):
    m = data.draw(SIZES)
    K = data.draw(kernels(m))
    pi = markov.stationary_distribution(K)
    f = data.draw(functions(m))
    f = f - np.dot(pi, f)
    gamma = exact_l2_contraction(K, pi)
    Kt = markov.t_step(K, t)
    prev = markov.t_step(K, t - 1) @ f
    norm = lambda g: math.sqrt(np.dot(pi, g * g))
    assert norm(Kt @ f) <= gamma * norm(prev) * (1 + 1e-9) + 1e-12
    assert centred_l2_norm(Kt, pi) <= gamma**t * (1 + 1e-8) + 1e-12
    # (K - 1 pi)^t = K^t - 1 pi when pi is stationary
    P = np.outer(np.ones(m), pi)
    np.testing.assert_allclose(np.linalg.matrix_power(K - P, t), Kt - P, atol=1e-10)


@N
@given(st.data(), CONVEX_YOUNG)
def test_luxemburg_amemiya_factor_two(data, psi):
    m = data.draw(SIZES)
    mu = data.draw(prob_vectors(m))
    f = data.draw(functions(m))
    lux = luxemburg_norm(f, mu, psi)
    am = amemiya_norm(f, mu, psi)
    assert lux <= am * (1 + 1e-7) + 1e-12
    assert am <= 2 * lux * (1 + 1e-7) + 1e-12


@N
@given(st.data(), st.floats(min_value=1.01, max_value=6.0))
def test_h_alpha_upper_sandwich(data, alpha):
    m = data.draw(SIZES)
    mu, nu = data.draw(prob_vectors(m)), data.draw(prob_vectors(m))
    h = divergence(nu, mu, "h_alpha", alpha)
    hell = divergence(nu, mu, "hellinger", alpha)
    assert h <= (alpha - 1) * hell + 2 + 1e-9


@N
@given(st.data(), st.floats(min_value=1.01, max_value=2.0))
def test_h_alpha_lower_sandwich_up_to_two(data, alpha):
    m = data.draw(SIZES)
    mu, nu = data.draw(prob_vectors(m)), data.draw(prob_vectors(m))
    h = divergence(nu, mu, "h_alpha", alpha)
    hell = divergence(nu, mu, "hellinger", alpha)
    assert (alpha - 1) * hell <= h * (1 + 1e-9) + 1e-12


def test_h_alpha_lower_sandwich_fails_above_two():
    # a point mass against the uniform binary law: (alpha-1) Hellinger = 2^(alpha-1) - 1, H_alpha = 1
    mu, nu = np.array([0.5, 0.5]), np.array([1.0, 0.0])
    assert 2 * divergence(nu, mu, "hellinger", 3.0) == 3.0
    assert divergence(nu, mu, "h_alpha", 3.0) == 1.0
