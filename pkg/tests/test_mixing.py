import itertools
import math

import numpy as np
import pytest

from contraction_lab import markov
from contraction_lab.errors import NotReached, ZeroMass
from contraction_lab.mixing import (
    event_bound_lp,
    event_bound_orlicz,
    exact_dirac_norms,
    exact_mixing_time,
    exponential_epsilon,
    hoeffding_tail,
    max_dirac_norm,
    mixed_hoeffding_bound,
    mixing_steps_for_exponential_rate,
    mixing_time_bound,
)
from contraction_lab.orlicz import HeavyTail, Power, SubGaussian, lp_norm, orlicz_norm


def test_dirac_norm_uniform_binary():
    assert max_dirac_norm([0.5, 0.5], Power(2), "L") == pytest.approx(1.0)
    assert exact_dirac_norms(np.eye(2), [0.5, 0.5], Power(2)).max() == pytest.approx(1.0)


def test_dirac_norm_skewed_binary():
    pi = np.array([0.9, 0.1])
    assert max_dirac_norm(pi, Power(2), "L") == pytest.approx(9 * math.sqrt(0.2))
    assert max_dirac_norm(pi, Power(2), "L") >= exact_dirac_norms(np.eye(2), pi, Power(2)).max()


@pytest.mark.parametrize("psi", [Power(1.5), Power(2), Power(4), SubGaussian(), HeavyTail(5, 5)], ids=lambda p: p.name)
@pytest.mark.parametrize("flavor", "AL")
def test_dirac_closed_form_dominates_exact(psi, flavor):
    if flavor == "A" and not psi.convex:
        pytest.skip("Amemiya closed form needs a convex Young function")
    rng = np.random.default_rng(4)
    for _ in range(10):
        pi = rng.dirichlet(np.ones(int(rng.integers(2, 6))))
        exact = exact_dirac_norms(np.eye(len(pi)), pi, psi, flavor).max()
        assert max_dirac_norm(pi, psi, flavor) >= exact * (1 - 1e-9)


def test_dirac_norm_rejects_zero_mass():
    with pytest.raises(ZeroMass):
        max_dirac_norm([1.0, 0.0], Power(2))
    with pytest.raises(ValueError):
        max_dirac_norm([0.5, 0.5], Power(2), "X")


def test_bsc_mixing_time():
    K = markov.bsc(0.1)
    report = mixing_time_bound(K, Power(2), "L", 0.01)
    assert report.dual_contraction == pytest.approx(0.8)
    assert report.sup_nu_norm == pytest.approx(1.0)
    assert report.bound_steps == math.ceil(math.log(100) / math.log(1.25)) == 21
    assert exact_mixing_time(K, Power(2), "L", 0.01) <= 21
    assert not report.vacuous


def test_independence_kernel_mixes_in_one_step():
    pi = np.array([0.2, 0.3, 0.5])
    K = markov.independence_kernel(pi)
    assert mixing_time_bound(K, Power(2), epsilon=1e-6).bound_steps == 1
    assert exact_mixing_time(K, Power(2), epsilon=1e-6) == 1


def test_identity_kernel_is_vacuous():
    pi = np.full(3, 1 / 3)
    assert mixing_time_bound(np.eye(3), Power(2), pi=pi).vacuous
    with pytest.raises(NotReached):
        exact_mixing_time(np.eye(3), Power(2), pi=pi, max_t=20)


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("psi", [Power(2), Power(4), SubGaussian()], ids=lambda p: p.name)
@pytest.mark.parametrize("flavor", "AL")
def test_mixing_bound_is_sound(seed, psi, flavor):
    rng = np.random.default_rng(seed)
    K = markov.random_stochastic(int(rng.integers(2, 7)), seed)
    eps = float(rng.choice([0.3, 0.05, 0.01]))
    report = mixing_time_bound(K, psi, flavor, eps)
    assert report.bound_steps >= exact_mixing_time(K, psi, flavor, eps)


def test_mixing_bound_heavy_tail():
    K = markov.random_stochastic(3, 7)
    psi = HeavyTail(5, 5)
    report = mixing_time_bound(K, psi, "L", 0.1)
    assert report.bound_steps >= exact_mixing_time(K, psi, "L", 0.1)


def test_lp_event_bound_arithmetic():
    assert event_bound_lp(0.04, 0.1, 2) == pytest.approx(0.06)
    assert event_bound_lp(0.3, 0.0, 3) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        event_bound_lp(0.0, 0.1, 2)


def test_lp_event_bound_monotone():
    for p in (1.1, 2.0, 9.0):
        grid = np.linspace(0.01, 1, 30)
        vals = [event_bound_lp(x, 0.2, p) for x in grid]
        assert np.all(np.diff(vals) >= 0)
        vals = [event_bound_lp(0.2, e, p) for e in grid]
        assert np.all(np.diff(vals) >= 0)


def test_orlicz_event_bound_stationary_start():
    for pE in (0.01, 0.3, 1.0):
        assert event_bound_orlicz(pE, 0.0, Power(2), "L") == pytest.approx(math.sqrt(pE))
    assert event_bound_orlicz(1.0, 0.0, SubGaussian(), "A") >= 1 - 1e-12


def test_orlicz_event_bound_heavy_tail_formula():
    psi = HeavyTail(5, 5)
    pE, eps = 1e-4, 0.5
    expected = pE * psi.inverse(1 / pE) * (eps + 1 / psi.inverse(1.0))
    assert event_bound_orlicz(pE, eps, psi, "L") == pytest.approx(expected)


def test_orlicz_event_bound_takes_minimum():
    psi = SubGaussian()
    a = event_bound_orlicz(0.1, 0.4, psi, "A")
    l = event_bound_orlicz(0.1, 0.3, psi, "L")
    assert event_bound_orlicz(0.1, {"A": 0.4, "L": 0.3}, psi) == min(a, l)
    with pytest.raises(ValueError):
        event_bound_orlicz(0.1, 0.1, psi, "Z")


def _events(m):
    for mask in range(1, 2**m):
        yield np.array([(mask >> i) & 1 for i in range(m)], dtype=bool)


@pytest.mark.parametrize("seed", range(3))
def test_exhaustive_events_lp(seed):
    K = markov.random_stochastic(5, seed)
    pi = markov.stationary_distribution(K)
    mu = np.random.default_rng(seed).dirichlet(np.ones(5) * 0.5)
    for t, p in itertools.product((1, 2, 3), (1.5, 2.0, 5.0)):
        law = mu @ markov.t_step(K, t)
        eps = lp_norm(law / pi - 1, pi, p)
        for E in _events(5):
            assert law[E].sum() <= event_bound_lp(pi[E].sum(), eps, p) + 1e-12


@pytest.mark.parametrize("psi", [Power(2), SubGaussian(), HeavyTail(2, 3)], ids=lambda p: p.name)
def test_exhaustive_events_orlicz(psi):
    m = 8
    K = markov.random_stochastic(m, 13)
    pi = markov.stationary_distribution(K)
    mu = np.random.default_rng(1).dirichlet(np.ones(m) * 0.3)
    law = mu @ K
    dens = law / pi - 1
    flavors = "AL" if psi.convex else "L"
    norms = {fl: orlicz_norm(dens, pi, psi, fl) for fl in flavors}
    for E in _events(m):
        pE = pi[E].sum()
        for fl in flavors:
            assert law[E].sum() <= event_bound_orlicz(pE, norms[fl], psi, fl) + 1e-12


def test_hoeffding_pipeline():
    n, eta, C, p = 200, 0.2, 1.0, 2.0
    eps = exponential_epsilon(n, eta, C, p)
    assert eps == pytest.approx(math.exp(n * eta**2 / 2))
    total = mixed_hoeffding_bound(n, eta, C, eps, p)
    # with that radius both terms decay at the same exponential rate
    assert total == pytest.approx(hoeffding_tail(n, eta, C) + 2**0.5 * math.exp(-n * eta**2 / 2))
    # the event bound with pi(E) at the Hoeffding tail is the pipeline's value
    pE = hoeffding_tail(n, eta, C)
    assert event_bound_lp(pE, eps, p) <= total + 1e-15


def test_steps_for_exponential_rate():
    c, S, n, eta, C, p = 0.5, 10.0, 50, 0.1, 1.0, 2.0
    steps = mixing_steps_for_exponential_rate(c, S, n, eta, C, p)
    # after that many steps c^t S has shrunk to the radius exponential_epsilon allows
    assert c**steps * S == pytest.approx(exponential_epsilon(n, eta, C, p))
    assert mixing_steps_for_exponential_rate(1.0, S, n, eta, C, p) == math.inf
    assert mixing_steps_for_exponential_rate(0.0, S, n, eta, C, p) == 0
    assert mixing_steps_for_exponential_rate(0.5, 1.0, 10, 1.0, 1.0, 2.0) == 0
