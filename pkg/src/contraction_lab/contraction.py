"""Upper bounds on contraction coefficients of Markov kernels, and their baselines.

The central quantity is the nested norm of centred densities,

    forward:  || || g_X - 1 ||_{phi*, N*; mu K} ||_{psi, N; mu}
    dual:     || || g_Y - 1 ||_{phi*, N*; mu}   ||_{psi, N; mu K}

which bounds the norm of K (forward, acting on mean-zero functions) or of
its adjoint K* (dual, acting on mean-zero densities).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from . import markov
from .errors import NotDoublyStochastic, NotStationary
from .orlicz import (
    INF_EXPONENT,
    Power,
    dual_flavor,
    lp_norm,
    orlicz_norm,
)


class Method(str, Enum):
    orlicz_nested = "orlicz_nested"
    lp_nested = "lp_nested"
    doubly_stochastic = "doubly_stochastic"
    tv_ess_sup = "tv_ess_sup"
    riesz_thorin = "riesz_thorin"
    stein = "stein"
    ultra_mixing = "ultra_mixing"
    exact_l2 = "exact_l2"
    brute_force = "brute_force"


@dataclass(frozen=True)
class ContractionBound:
    value: float
    method: Method
    inputs: dict = field(default_factory=dict)

    @property
    def vacuous(self):
        """True when the bound exceeds 1 and so says nothing about contraction."""
        return self.value > 1.0

    def __float__(self):
        return float(self.value)


def _direction(direction):
    d = direction.lower()
    if d in ("forward", "fwd"):
        return "forward"
    if d == "dual":
        return "dual"
    raise ValueError(f"direction must be forward or dual, got {direction!r}")


def _density_rows(K, mu, direction):
    """Centred density rows with (inner measure, outer measure)."""
    dens = markov.densities(K, mu)
    if _direction(direction) == "forward":
        return dens.forward - 1.0, dens.pushed_measure, dens.base_measure
    return dens.dual - 1.0, dens.base_measure, dens.pushed_measure


def conjugate_exponent(p):
    p = float(p)
    if p >= INF_EXPONENT:
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def orlicz_contraction_bound(K, mu, psi, phi=None, flavor="L", direction="forward"):
    """Nested Orlicz-norm bound; phi defaults to psi."""
    phi = psi if phi is None else phi
    rows, inner_mu, outer_mu = _density_rows(K, mu, direction)
    inner_young = phi.conjugate_function()
    inner_flavor = dual_flavor(flavor)
    inner = np.array([orlicz_norm(r, inner_mu, inner_young, inner_flavor) for r in rows])
    value = orlicz_norm(inner, outer_mu, psi, flavor)
    return ContractionBound(
        value,
        Method.orlicz_nested,
        {"psi": psi.name, "phi": phi.name, "flavor": flavor.upper(), "direction": _direction(direction)},
    )


def lp_contraction_bound(K, mu, p, q=None, direction="forward"):
    """|| || g - 1 ||_{L_{q*}} ||_{L_p}; q = p bounds the L_p contraction, q < p hypercontraction."""
    q = p if q is None else q
    rows, inner_mu, outer_mu = _density_rows(K, mu, direction)
    q_star = conjugate_exponent(q)
    inner = np.array([lp_norm(r, inner_mu, q_star) for r in rows])
    value = lp_norm(inner, outer_mu, p)
    return ContractionBound(value, Method.lp_nested, {"p": float(p), "q": float(q), "direction": _direction(direction)})


def _check_stationary(K, pi, tol=1e-8):
    K = markov.validate_kernel(K)
    pi = markov.validate_prob(pi)
    if np.abs(pi @ K - pi).max() > tol:
        raise NotStationary("pi K differs from pi")
    return K, pi


def exact_l2_contraction(K, pi):
    """||K||_{L_2^0(pi) -> L_2^0(pi)} from the deflated pi-weighted matrix."""
    K, pi = _check_stationary(K, pi)
    s = np.sqrt(pi)
    W = s[:, None] * K / s[None, :]
    return float(np.linalg.norm(W - np.outer(s, s), 2))


def centred_l2_norm(M, pi):
    """||(M - 1_pi)||_{L_2(pi) -> L_2(pi)} for a pi-stationary kernel M."""
    s = np.sqrt(pi)
    W = s[:, None] * M / s[None, :]
    return float(np.linalg.norm(W - np.outer(s, s), 2))


def doubly_stochastic_bound(Lam, p):
    """(sum_j (sum_i |Lam[j, i] - 1/m|^q)^(p/q))^(1/p) with q = p / (p - 1).

    Equals the forward L_p bound of Lam under the uniform measure, which is
    also the dual bound of Lam transposed.
    """
    Lam = markov.validate_kernel(Lam)
    if np.abs(Lam.sum(axis=0) - 1.0).max() > 1e-10:
        raise NotDoublyStochastic("columns do not sum to 1")
    m = Lam.shape[0]
    q = conjugate_exponent(p)
    dev = np.abs(Lam - 1.0 / m)
    ones = np.ones(m)
    # lp_norm with unit weights gives the plain (unnormalised) sums
    inner = np.array([lp_norm(row, ones, q) for row in dev])
    value = lp_norm(inner, ones, p)
    return ContractionBound(value, Method.doubly_stochastic, {"p": float(p), "q": q})


def tv_ergodicity_bound(K, pi, t=1):
    """max_x sum_y |K^t(x, y) - pi(y)|, the exact L_inf -> L_inf norm of K^t - 1_pi."""
    Kt = markov.t_step(K, t)
    return float(np.abs(Kt - np.asarray(pi)[None, :]).sum(axis=1).max())


def l1_centred_norm(Kt, pi):
    """Exact ||K^t - 1_pi||_{L_1(pi) -> L_1(pi)}: max_y sum_x pi(x) |K^t(x,y) - pi(y)| / pi(y)."""
    pi = np.asarray(pi)
    col = (pi[:, None] * np.abs(Kt - pi[None, :])).sum(axis=0)
    return float((col / pi).max())


def ultra_mixing_epsilon(K):
    """min over x, y, z with K(z|y) > 0 of K(z|x) / K(z|y)."""
    K = markov.validate_kernel(K)
    eps = math.inf
    for z in range(K.shape[1]):
        col = K[:, z]
        pos = col > 0
        if not pos.any():
            continue
        eps = min(eps, col.min() / col[pos].max())
    return float(eps)


def riesz_thorin_baseline(gamma, p, t):
    """Interpolated spectral-gap bound on ||K^t - 1_pi||_{L_p -> L_p} with endpoint constant 2."""
    p = float(p)
    if p == 1.0 or p >= INF_EXPONENT:
        return 2.0
    if p == 2.0:
        return gamma**t
    if p < 2.0:
        return 2.0 ** (2.0 / p) * gamma ** (2.0 * t * (p - 1.0) / p)
    return 2.0 ** (2.0 * (p - 1.0) / p) * gamma ** (2.0 * t / p)


def riesz_thorin_exact_endpoints(K, pi, p, t):
    """Riesz-Thorin interpolation between gamma^t at p=2 and the exact L_1 or L_inf norm of K^t - 1_pi."""
    gamma = exact_l2_contraction(K, pi)
    p = float(p)
    Kt = markov.t_step(K, t)
    if p == 2.0:
        return gamma**t
    if p > 2.0:
        end = tv_ergodicity_bound(K, pi, t)
        theta = 1.0 - 2.0 / p
    else:
        end = l1_centred_norm(Kt, pi)
        theta = 2.0 / p - 1.0
    return gamma ** (t * (1.0 - theta)) * end**theta


def semigroup_bounds(K, t, p=None, q=2.0, t_inf=2.0):
    """(ours, stein) for H_t = exp(-t(I - K)).

    ours is || || h_t^X - 1 ||_{L_{q*}(pi)} ||_{L_p(pi)}; stein is
    M^(t / t_inf) with M = max_x || h_{t_inf}^x - 1 ||_{L_2(pi)}. When p is
    None it is set to 2 t_inf / (t_inf - t), the exponent the Stein
    interpolation reaches at time t.
    """
    K = markov.validate_kernel(K)
    pi = markov.stationary_distribution(K)
    if p is None:
        if not t < t_inf:
            raise ValueError("the Stein exponent needs t < t_inf")
        p = 2.0 * t_inf / (t_inf - t)
    H = markov.semigroup(K, t).matrix
    ours = lp_contraction_bound(H, pi, p, q, "forward").value
    H_inf = markov.semigroup(K, t_inf).matrix
    M = max(lp_norm(H_inf[x] / pi - 1.0, pi, 2.0) for x in range(K.shape[0]))
    stein = M ** (t / t_inf)
    return ours, stein


# ---------------------------------------------------------------------------
# brute-force oracle


def _operator(K, mu, direction, centred_only):
    """(matrix A, domain measure, codomain measure) with f -> A f."""
    K = markov.validate_kernel(K)
    mu = markov.validate_prob(mu)
    pushed = mu @ K
    if _direction(direction) == "forward":
        A, dom, cod = K, pushed, mu
    else:
        A, dom, cod = markov.dual_kernel(K, mu), mu, pushed
    if not centred_only:
        # K - 1_pi acting on all functions (needs mu stationary, so dom = cod)
        A = A - np.outer(np.ones(A.shape[0]), dom)
    return A, dom, cod


def brute_force_contraction(
    K,
    mu,
    psi=None,
    flavor="L",
    direction="forward",
    restarts=64,
    iterations=500,
    seed=0,
    centred_only=True,
    init=None,
    full_output=False,
):
    """Multi-start local maximisation of ||A f|| / ||f|| (a lower estimate of the operator norm).

    With ``centred_only`` f ranges over mean-zero functions and A is K (or K*);
    otherwise f is unrestricted and A is K - 1_pi. ``init`` adds starting
    points. Restart seeds come from numpy SeedSequence spawning.
    """
    psi = Power(2) if psi is None else psi
    A, dom, cod = _operator(K, mu, direction, centred_only)
    m = A.shape[0]

    def embed(z):
        return z - np.dot(dom, z) if centred_only else z

    def neg_ratio(z):
        f = embed(z)
        den = orlicz_norm(f, dom, psi, flavor)
        if den <= 1e-300:
            return 0.0
        return -orlicz_norm(A @ f, cod, psi, flavor) / den

    starts = [np.asarray(z, dtype=float) for z in (init or [])]
    for child in np.random.SeedSequence(seed).spawn(restarts):
        starts.append(np.random.default_rng(child).normal(size=m))
    best, best_f = 0.0, np.zeros(m)
    for z0 in starts:
        res = minimize(neg_ratio, z0, method="L-BFGS-B", options={"maxiter": iterations})
        for z in (res.x, z0):
            v = -neg_ratio(z)
            if v > best:
                best, best_f = v, embed(z)
    if full_output:
        return best, best_f
    return best


def sign_vector_sup(M):
    """max over f in {-1, 1}^m of ||M f||_inf, by enumeration."""
    m = M.shape[1]
    best = 0.0
    for signs in itertools.product((-1.0, 1.0), repeat=m):
        best = max(best, float(np.abs(M @ np.array(signs)).max()))
    return best
