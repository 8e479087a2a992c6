"""Concentration for Markov chains: MCMC tails, burn-in, McDiarmid-type products.

Functions of the chain are averages of a test function h with values in
[0, 1], so each coordinate has bounded difference 1/t. Scenarios with a
different scale should rescale eta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from . import markov
from .contraction import conjugate_exponent, lp_contraction_bound, doubly_stochastic_bound
from .errors import DeltaTooSmall, LambdaOutOfRange, NotDoublyStochastic, ZeroMass
from .orlicz import INF_EXPONENT, lp_norm


@dataclass
class ConcentrationScenario:
    """A chain X_1, ..., X_t with X_1 ~ start and X_i ~ X_{i-1} K_i.

    ``kernels`` is one kernel (time-homogeneous) or a list whose entry i-2
    drives step i; a short list is extended by its last kernel.
    """

    kernels: list
    start: np.ndarray
    t: int
    eta: float
    p: float = math.inf
    t0: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ks = self.kernels
        if isinstance(ks, np.ndarray) and ks.ndim == 2:
            ks = [ks]
        self.kernels = [markov.validate_kernel(K) for K in ks]
        if not self.kernels:
            raise ValueError("a scenario needs at least one kernel")
        self.start = markov.validate_prob(self.start)
        if self.start.size != self.kernels[0].shape[0]:
            raise ValueError("start and kernel sizes differ")
        if int(self.t) != self.t or self.t < 1:
            raise ValueError("t must be a positive integer")
        self.t = int(self.t)
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if self.t0 < 0:
            raise ValueError("t0 must be nonnegative")

    @property
    def q(self):
        return conjugate_exponent(self.p)

    def kernel(self, i):
        """Kernel moving X_{i-1} to X_i (i >= 2)."""
        return self.kernels[min(i - 2, len(self.kernels) - 1)]

    def marginals(self):
        """P_1, ..., P_t as a (t, m) array."""
        P = np.empty((self.t, self.start.size))
        P[0] = self.start
        for i in range(2, self.t + 1):
            P[i - 1] = P[i - 2] @ self.kernel(i)
        return P


def _p_is_inf(p):
    return p >= INF_EXPONENT


def omega(P, p):
    """max_x ((1 - P(x))^p P(x)^(1-p) + (1 - P(x)))^(1/p); at p = inf, max_x (1 - P(x)) / P(x)."""
    P = np.asarray(P, dtype=float)
    if np.any(P <= 0):
        raise ZeroMass("omega needs a strictly positive marginal")
    rest = np.clip(1.0 - P, 0.0, None)
    if _p_is_inf(p):
        return float((rest / P).max())
    with np.errstate(divide="ignore"):
        log_rest = np.log(rest)
        log_term = np.logaddexp(p * log_rest + (1.0 - p) * np.log(P), log_rest)
    return float(np.exp(log_term / p).max())


def markov_mcdiarmid_bound(scn, return_log=False, factors=False):
    """2^(1/q) exp(-2 t eta^2 / q) prod_{i=2}^t (c_i omega_i + 1).

    c_i is the dual L_p bound of K_i at the marginal P_{i-1} and omega_i is
    :func:`omega` of that marginal. The product is accumulated in logs.
    With ``factors=True`` the per-step values c_i omega_i + 1 are returned too.
    """
    p, q = scn.p, scn.q
    log_bound = math.log(2.0) / q - 2.0 * scn.t * scn.eta**2 / q
    P = scn.start
    cached = None  # (kernel id, marginal, factor)
    steps = []
    for i in range(2, scn.t + 1):
        K = scn.kernel(i)
        if cached is not None and cached[0] is K and np.abs(cached[1] - P).max() < 1e-15:
            f = cached[2]
        else:
            if np.any(P <= 0):
                raise ZeroMass(f"marginal P_{i - 1} has a zero-mass state")
            c = lp_contraction_bound(K, P, p, direction="dual").value
            f = c * omega(P, p) + 1.0
            cached = (K, P, f)
        log_bound += math.log(f)
        if factors:
            steps.append(f)
        P = P @ K
    value = log_bound if return_log else math.exp(min(log_bound, 700.0))
    return (value, steps) if factors else value


def mcdiarmid_independent(t, eta, p=math.inf):
    """2^(1/q) exp(-2 t eta^2 / q), the rate when the coordinates are independent."""
    q = conjugate_exponent(p)
    return 2.0 ** (1.0 / q) * math.exp(-2.0 * t * eta**2 / q)


# ---------------------------------------------------------------------------
# general binary channel, p -> infinity, stationary start


def _relabel(lam, kappa):
    """Swap the two states if needed so that kappa >= lam; the chain is unchanged up to labels."""
    if not (0 < lam <= 1 and 0 < kappa <= 1):
        raise LambdaOutOfRange("lam and kappa must lie in (0, 1]")
    return (lam, kappa) if kappa >= lam else (kappa, lam)


def binary_channel_factor(lam, kappa, p=math.inf):
    """2 |1 - lam - kappa| ((kappa/lam)^p lam/(lam+kappa) + kappa/(lam+kappa))^(1/p) + 1.

    The states are relabelled first so that kappa >= lam; at p = inf the
    factor is then (2 |1 - lam - kappa| kappa + lam) / lam.
    """
    lam, kappa = _relabel(lam, kappa)
    theta = abs(1.0 - lam - kappa)
    s = lam + kappa
    if _p_is_inf(p):
        w = kappa / lam
    else:
        w = math.exp(np.logaddexp(p * math.log(kappa / lam) + math.log(lam / s), math.log(kappa / s)) / p)
    return 2.0 * theta * w + 1.0


def binary_channel_bound(lam, kappa, t, eta, p=math.inf):
    """Contraction-based tail for the binary chain: 2^(1/q) exp(-2 t eta^2/q + (t-1) log factor)."""
    q = conjugate_exponent(p)
    log_b = math.log(2.0) / q - 2.0 * t * eta**2 / q + (t - 1) * math.log(binary_channel_factor(lam, kappa, p))
    return math.exp(min(log_b, 700.0))


def binary_hypercontractivity_factor(lam, kappa):
    """(lam + kappa) / lam after relabelling so that kappa >= lam."""
    lam, kappa = _relabel(lam, kappa)
    return (lam + kappa) / lam


def binary_hypercontractivity_bound(lam, kappa, t, eta):
    """2 exp(-2 t eta^2 + (t-1) log((lam + kappa) / lam))."""
    log_b = math.log(2.0) - 2.0 * t * eta**2 + (t - 1) * math.log(binary_hypercontractivity_factor(lam, kappa))
    return math.exp(min(log_b, 700.0))


def binary_improves(lam, kappa):
    """The improvement predicate 2 |1 - lam - kappa| < 1."""
    return 2.0 * abs(1.0 - lam - kappa) < 1.0


def binary_thresholds(lam, kappa):
    """Leading-order eta thresholds (ours, hypercontractivity) for exponential decay."""
    ours = math.sqrt(max(0.0, 0.5 * math.log(binary_channel_factor(lam, kappa))))
    hyper = math.sqrt(0.5 * math.log(binary_hypercontractivity_factor(lam, kappa)))
    return ours, hyper


def literature_baselines(lam, kappa, t, eta):
    """(paulin, fan, marton) tails for the binary chain with theta = |1 - lam - kappa|."""
    theta = abs(1.0 - lam - kappa)
    s = lam + kappa
    paulin = math.exp(-(s**2) * t * eta**2 / (1.0 - theta**t) ** 2)
    fan = math.exp(-t * eta**2 * s / (2.0 - s))
    marton = math.exp(min(700.0, -2.0 * t * eta**2 * s**2 + 2.0 * t * s * math.sqrt(t * math.log(2.0) / 2.0)))
    return paulin, fan, marton


def crossover_thresholds(lam, kappa, t=math.inf):
    """Lower bounds on eta^2 beyond which the binary bound beats each literature baseline.

    Uses varpi = log(2 theta kappa / lam) with kappa >= lam after relabelling;
    entries are nan where varpi is negative or undefined.
    """
    lam, kappa = _relabel(lam, kappa)
    theta = abs(1.0 - lam - kappa)
    arg = 2.0 * theta * kappa / lam
    varpi = math.log(arg) if arg > 0 else -math.inf
    tail = 0.0 if math.isinf(t) else theta**t
    a = (1.0 - tail) ** 2
    first = varpi * a / (2.0 * a - (1.0 - theta) ** 2)
    second = varpi * (1.0 + theta) / (2.0 * theta) if theta > 0 else math.nan
    third = math.sqrt(varpi) / (1.0 - theta**2) if varpi >= 0 else math.nan
    return first, second, third


# ---------------------------------------------------------------------------
# doubly stochastic kernels


def _check_doubly(Lam):
    Lam = markov.validate_kernel(Lam)
    if np.abs(Lam.sum(axis=0) - 1.0).max() > 1e-10:
        raise NotDoublyStochastic("columns do not sum to 1")
    return Lam


def doubly_stochastic_factor(Lam, p):
    """(min{S, 1} ((m-1)^p/m + (m-1)/m))^(1/p) + 1 with S the p-th power of the dual L_p bound."""
    Lam = _check_doubly(Lam)
    m = Lam.shape[0]
    # the dual densities at the uniform law are the columns of Lam
    norm = doubly_stochastic_bound(Lam.T, p).value
    if _p_is_inf(p):
        return min(norm, 1.0) * (m - 1) + 1.0
    log_s = min(p * math.log(norm), 0.0) if norm > 0 else -math.inf
    log_w = np.logaddexp(p * math.log(m - 1) - math.log(m), math.log((m - 1) / m))
    return math.exp((log_s + log_w) / p) + 1.0


def doubly_stochastic_bound_tail(Lam, t, eta, p):
    """2^(1/q) exp(-2 t eta^2 / q) factor^(t-1) with the clamped doubly stochastic factor."""
    q = conjugate_exponent(p)
    log_b = math.log(2.0) / q - 2.0 * t * eta**2 / q + (t - 1) * math.log(doubly_stochastic_factor(Lam, p))
    return math.exp(min(log_b, 700.0))


def doubly_stochastic_old_bound(m, t, eta, p):
    """2^(1/q) exp(-2 t eta^2 / q) m^((t-1)/q)."""
    q = conjugate_exponent(p)
    return math.exp(min(700.0, math.log(2.0) / q - 2.0 * t * eta**2 / q + (t - 1) * math.log(m) / q))


def doubly_stochastic_thresholds(Lam, p):
    """Leading-order eta thresholds (ours, old) for the doubly stochastic bounds."""
    q = conjugate_exponent(p)
    m = np.asarray(Lam).shape[0]
    ours = math.sqrt(q * math.log(doubly_stochastic_factor(Lam, p)) / 2.0)
    return ours, math.sqrt(math.log(m) / 2.0)


def general_thresholds(K, p, pi=None):
    """(eta_2, eta_1): the contraction-based and the log(m) thresholds at the stationary start."""
    K = markov.validate_kernel(K)
    pi = markov.stationary_distribution(K) if pi is None else markov.validate_prob(pi)
    q = conjugate_exponent(p)
    c = lp_contraction_bound(K, pi, p, direction="dual").value
    eta2 = math.sqrt(q * math.log(c * omega(pi, p) + 1.0) / 2.0)
    return eta2, math.sqrt(math.log(K.shape[0]) / 2.0)


# ---------------------------------------------------------------------------
# MCMC estimation with burn-in


def _bsc_lambda(lam):
    if not 0 < lam < 0.5:
        raise LambdaOutOfRange("the MCMC bounds need 0 < lam < 1/2")
    return lam


def fan_constant(gamma, t0, p, start_norm, start_sup_density):
    """C(nu, t0, p) in its three cases; gamma is the second eigenvalue modulus."""
    if _p_is_inf(p):
        return start_sup_density
    q = conjugate_exponent(p)
    if p <= 2.0:
        pre = 1.0 if p == 2.0 else 2.0 ** (2.0 / p)
        return 1.0 + pre * gamma ** (2.0 * t0 / q) * start_norm
    return 1.0 + 2.0 ** (2.0 / q) * gamma ** (2.0 * t0 / p) * start_norm


def _start_norms(nu, pi, p):
    nu = markov.validate_prob(nu)
    dens = nu / pi
    return lp_norm(dens - 1.0, pi, p), float(dens.max())


def mcmc_tail_bounds(lam, t, eta, p, t0, nu):
    """(ours, fan) for averages of a BSC(lam) chain started at nu after t0 burn-in steps."""
    lam = _bsc_lambda(lam)
    pi = np.array([0.5, 0.5])
    q = conjugate_exponent(p)
    norm, sup_density = _start_norms(nu, pi, p)
    rate = lam / (1.0 - lam)
    gamma = abs(1.0 - 2.0 * lam)
    ours = math.exp(-2.0 * rate * t * eta**2) + gamma**t0 * math.exp(-2.0 * rate * t * eta**2 / q) * norm
    fan = fan_constant(gamma, t0, p, norm, sup_density) * math.exp(-2.0 * rate * t * eta**2 / q)
    return ours, fan


def mcmc_tail_bounds_general(K, t, eta, p, t0, nu, pi=None):
    """(ours, fan) for a reversible-rate surrogate of a general kernel.

    lam / (1 - lam) becomes (1 - gamma) / (1 + gamma) with gamma the exact L_2
    contraction, and |1 - 2 lam|^t0 becomes the dual L_p bound of K^t0.
    """
    from .contraction import exact_l2_contraction

    K = markov.validate_kernel(K)
    pi = markov.stationary_distribution(K) if pi is None else markov.validate_prob(pi)
    q = conjugate_exponent(p)
    gamma = exact_l2_contraction(K, pi)
    rate = (1.0 - gamma) / (1.0 + gamma)
    norm, sup_density = _start_norms(nu, pi, p)
    burn = lp_contraction_bound(markov.t_step(K, t0), pi, p, direction="dual").value if t0 > 0 else 1.0
    ours = math.exp(-2.0 * rate * t * eta**2) + burn * math.exp(-2.0 * rate * t * eta**2 / q) * norm
    fan = fan_constant(gamma, t0, p, norm, sup_density) * math.exp(-2.0 * rate * t * eta**2 / q)
    return ours, fan


def burn_in_lower_bound(delta, t, eta, lam, M):
    """t0 >= log((delta - B) / (B M)) / log|1 - 2 lam| with B = exp(-2 lam t eta^2 / (1 - lam)).

    Returns 0 when delta >= B (1 + M); raises DeltaTooSmall when delta <= B,
    because the stationary term alone already exceeds delta.
    """
    if not 0 < lam < 1 or lam == 0.5:
        raise LambdaOutOfRange("lam must lie in (0, 1) and differ from 1/2")
    B = math.exp(-2.0 * lam * t * eta**2 / (1.0 - lam))
    if delta <= B:
        raise DeltaTooSmall(f"delta={delta:g} is at most the stationary term {B:g}; no burn-in suffices")
    if M <= 0 or delta >= B * (1.0 + M):
        return 0.0
    return max(0.0, math.log((delta - B) / (B * M)) / math.log(abs(1.0 - 2.0 * lam)))


# ---------------------------------------------------------------------------
# Monte Carlo oracle


@dataclass(frozen=True)
class EmpiricalTail:
    frequency: float
    wilson_lo: float
    wilson_hi: float
    hits: int
    trials: int


def simulate_chain(scn, trials, seed, burn_in=0):
    """(trials, t) array of states; the first burn_in steps are run and dropped."""
    rng = np.random.default_rng(seed)
    m = scn.start.size
    state = np.minimum(np.searchsorted(np.cumsum(scn.start), rng.random(trials), side="right"), m - 1)
    total = burn_in + scn.t
    out = np.empty((trials, scn.t), dtype=np.int64)
    for step in range(1, total + 1):
        if step > 1:
            cum = np.cumsum(scn.kernel(step), axis=1)
            u = rng.random(trials)
            state = np.minimum((u[:, None] >= cum[state]).sum(axis=1), m - 1)
        if step > burn_in:
            out[:, step - burn_in - 1] = state
    return out


def _wilson(k, n):
    ci = binomtest(int(k), int(n)).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def empirical_tail(scn, h, trials=100_000, seed=0, centre=None, one_sided=False):
    """Frequency of |mean h(X_i) - centre| >= eta with a Wilson 95% interval.

    h maps states to [0, 1]; the default centre is the mean of P_i(h).
    """
    h = _check_test_function(h)
    if centre is None:
        centre = float((scn.marginals() @ h).mean())
    dev = h[simulate_chain(scn, trials, seed)].mean(axis=1) - centre
    hit = dev >= scn.eta if one_sided else np.abs(dev) >= scn.eta
    k = int(hit.sum())
    return EmpiricalTail(k / trials, *_wilson(k, trials), k, trials)


def empirical_tail_curve(scn, h, trials=10_000, seed=0):
    """empirical_tail for every prefix length 1..t from a single batch of paths."""
    h = _check_test_function(h)
    values = h[simulate_chain(scn, trials, seed)]
    steps = np.arange(1, scn.t + 1)
    means = np.cumsum(values, axis=1) / steps
    centres = np.cumsum(scn.marginals() @ h) / steps
    hits = (np.abs(means - centres[None, :]) >= scn.eta).sum(axis=0)
    return [EmpiricalTail(int(k) / trials, *_wilson(k, trials), int(k), trials) for k in hits]


def _check_test_function(h):
    h = np.asarray(h, dtype=float)
    if np.any(h < 0) or np.any(h > 1):
        raise ValueError("h must take values in [0, 1]")
    return h
