"""Strong data-processing bounds: eta_phi(mu, K) = sup_nu D(nu K || mu K) / D(nu || mu)."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from . import markov
from .contraction import lp_contraction_bound
from .errors import DegenerateDivergence, LambdaOutOfRange, PostconditionViolation
from .orlicz import divergence, entropy_phi, kl, rho_functional, tilde_phi


@dataclass(frozen=True)
class SdpiReport:
    divergence: str
    bound: float
    baseline: float | None = None
    oracle: float | None = None
    inputs: dict = field(default_factory=dict)


def dobrushin_eta_tv(K):
    """max over pairs of rows of the total-variation distance between them."""
    K = markov.validate_kernel(K)
    diff = np.abs(K[:, None, :] - K[None, :, :]).sum(axis=2)
    return 0.5 * float(diff.max())


def hellinger_sdpi_bound(K, mu, alpha):
    """|| || g_Y - 1 ||_{L_beta(mu)} ||_{L_alpha(mu K)}^alpha, beta = alpha / (alpha - 1).

    Bounds the SDPI constant of H_alpha(nu || mu) = ||dnu/dmu - 1||_alpha^alpha;
    alpha = 2 is the chi-square case. The Dobrushin coefficient is attached as
    baseline.
    """
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")
    value = lp_contraction_bound(K, mu, alpha, alpha, "dual").value ** alpha
    kind = "chi2" if alpha == 2 else f"h_alpha({alpha:g})"
    return SdpiReport(kind, value, baseline=dobrushin_eta_tv(K), inputs={"alpha": float(alpha)})


def binary_hellinger_closed_form(lam, kappa, p, alpha):
    """Closed form of the Hellinger-type bound for general_binary(lam, kappa) with mu = (p, 1 - p)."""
    beta = alpha / (alpha - 1.0)
    pushed = np.array([p, 1 - p]) @ markov.general_binary(lam, kappa)
    spread = p * (1 - p) ** beta + p**beta * (1 - p)
    return abs(1 - lam - kappa) ** alpha * spread ** (alpha / beta) * float(np.sum(pushed ** (1 - alpha)))


# ---------------------------------------------------------------------------
# random walks on graphs


def graph_chi2_bound(graph, lam):
    """|V|(1 - lam)^2 + lam^2 sum_y h(y)/deg(y) - 1 with h(y) = sum_{x ~ y} 1/deg(x)."""
    markov.graph_walk(graph, lam)  # validates connectivity
    deg = graph.degrees()
    h = np.zeros(graph.n_vertices)
    for a, b in graph.edges:
        h[a] += 1.0 / deg[b]
        h[b] += 1.0 / deg[a]
    return graph.n_vertices * (1 - lam) ** 2 + lam**2 * float(np.sum(h / deg)) - 1.0


def complete_graph_chi2_bound(n, lam):
    return n * (1 - lam) ** 2 + lam**2 * n / (n - 1) - 1.0


def complete_graph_chi2_range(n):
    """Interval of lam on which the complete-graph chi-square bound is at most 1."""
    r = math.sqrt(n - 1)
    return (n - 1 - r) / n, (n - 1 + r) / n


# ---------------------------------------------------------------------------
# KL


def refined_hoeffding(kind, arg):
    """Variance proxies from the distribution-refined Hoeffding lemma.

    kind='binary_p':    c(p) = (2p - 1) / (2 log(p / (1 - p))), so that the
                        log-MGF of a two-point variable is at most c(p) t^2 R^2 / 2.
    kind='range_kappa': c(kappa) with log-MGF <= c(kappa) t^2 R^2 for t >= 0,
                        where kappa is the relative position of the mean in the range.
    """
    x = float(arg)
    if not 0 <= x <= 1:
        raise ValueError("argument must lie in [0, 1]")
    if kind == "binary_p":
        if x in (0.0, 1.0):
            return 0.0
        if abs(x - 0.5) < 1e-7:
            return 0.25
        return (2 * x - 1) / (2 * math.log(x / (1 - x)))
    if kind == "range_kappa":
        if x == 0.0:
            return 0.0
        if x < 0.5:
            if 0.5 - x < 1e-7:
                return 0.125
            return (1 - 2 * x) / (4 * math.log((1 - x) / x))
        return x * (1 - x) / 2
    raise ValueError(f"unknown kind {kind!r}")


def phi_hat(rho, below_one):
    """tilde_phi where dnuK/dmuK < 1, entropy_phi elsewhere."""
    rho = np.asarray(rho, dtype=float)
    return np.where(below_one, tilde_phi(rho), entropy_phi(rho))


def kl_sdpi_bound(K, mu, nu, check=True, one_sided=False):
    """(phi-hat bound, quadratic bound) on D(nu K || mu K).

    Each output state y contributes muK(y) phi_hat(rho_y), where rho_y is the
    rho functional at level D(nu || mu) of g_y, or of -g_y on the set where
    dnuK/dmuK < 1. The sign flip is what controls |dnuK/dmuK - 1| there;
    ``one_sided=True`` uses g_y everywhere instead, which is not a valid
    bound in general. The quadratic relaxation replaces phi_hat(rho) by
    rho^2. With ``check`` the true value is compared against both bounds and
    PostconditionViolation is raised on failure.
    """
    dens = markov.densities(K, mu)
    nu = markov.validate_prob(nu)
    D = kl(nu, dens.base_measure)
    if D <= 0:
        warnings.warn("nu equals mu: the bound is 0", DegenerateDivergence, stacklevel=2)
        return 0.0, 0.0
    pushed = dens.pushed_measure
    below = (nu @ markov.validate_kernel(K)) / pushed < 1.0
    flip = below & (not one_sided)
    rho = np.array([rho_functional(-g if f else g, dens.base_measure, D) for g, f in zip(dens.dual, flip)])
    bound = float(np.dot(pushed, phi_hat(rho, below)))
    quad = float(np.dot(pushed, rho**2))
    if check:
        actual = kl(nu @ K, pushed)
        if actual > bound + 1e-10 or bound > quad + 1e-10:
            raise PostconditionViolation(
                f"expected D(nuK||muK)={actual:.12g} <= {bound:.12g} <= {quad:.12g}"
            )
    return bound, quad


def binary_kl_hoeffding_bound(lam, kappa, p, D, below_one=None):
    """Hoeffding-relaxed KL bound for general_binary(lam, kappa), mu = (p, 1 - p).

    rho_y is replaced by sqrt(2 c(p) D R_y^2) with R_y = |1 - lam - kappa| / muK(y),
    the range of g_y. ``below_one`` names the output state where dnuK/dmuK < 1;
    when omitted the larger of the two assignments is returned (a nu-free bound).
    """
    pushed = np.array([p, 1 - p]) @ markov.general_binary(lam, kappa)
    theta = abs(1 - lam - kappa)
    rho = np.sqrt(2 * refined_hoeffding("binary_p", p) * D * theta**2 / pushed**2)
    choices = [below_one] if below_one is not None else [0, 1]
    return max(
        float(np.dot(pushed, phi_hat(rho, np.arange(2) == y))) for y in choices
    )


def graph_kl_bounds(n_vertices, lam, nu=None):
    """(ours, raginsky) for the lazy walk on the complete graph at stationarity.

    ours = tilde_phi(sqrt(4 d c(kappa) D)) with kappa = 1/|V| and
    d = (|V|(1 - lam) - |V| lam / (|V| - 1))^2; raginsky = D |V|^2/2 (1 - |V| lam/(|V| - 1))^2.
    D = D(nu || uniform), or its maximum log|V| when nu is None.
    """
    n = int(n_vertices)
    if n < 2:
        raise ValueError("need at least two vertices")
    if not 0 <= lam < (n - 1) / n:
        raise LambdaOutOfRange(f"lam must lie in [0, {(n - 1) / n:g})")
    D = math.log(n) if nu is None else kl(nu, np.full(n, 1.0 / n))
    d = (n * (1 - lam) - n * lam / (n - 1)) ** 2
    c = refined_hoeffding("range_kappa", 1.0 / n)
    ours = float(tilde_phi(math.sqrt(4 * d * c * D)))
    raginsky = D * n**2 / 2 * (1 - n * lam / (n - 1)) ** 2
    return ours, raginsky


def graph_kl_linear_form(n_vertices, lam, D):
    """D * tilde_phi(sqrt(4 d c(kappa))): the bound written as a linear SDPI in D."""
    n = int(n_vertices)
    d = (n * (1 - lam) - n * lam / (n - 1)) ** 2
    c = refined_hoeffding("range_kappa", 1.0 / n)
    return D * float(tilde_phi(math.sqrt(4 * d * c)))


def subgaussian_sdpi_bound(K, mu):
    """2 muK(sigma^2(g_Y)) with sigma^2 from the refined Hoeffding lemma.

    For g_y with range R and mean 1 at relative position kappa, the proxy is
    2 max(c(kappa), c(1 - kappa)) R^2, which controls the log-MGF for both
    signs of t.
    """
    dens = markov.densities(K, mu)
    total = 0.0
    for y, g in enumerate(dens.dual):
        lo, hi = float(g.min()), float(g.max())
        R = hi - lo
        if R <= 0:
            continue
        kappa = min(max((1.0 - lo) / R, 0.0), 1.0)
        c = max(refined_hoeffding("range_kappa", kappa), refined_hoeffding("range_kappa", 1 - kappa))
        total += dens.pushed_measure[y] * 2 * c * R**2
    return 2.0 * total


# ---------------------------------------------------------------------------
# brute-force oracle


def _row_divergence(P, q, kind, alpha):
    """Divergence of every row of P from q."""
    r = P / q[None, :]
    if kind == "kl":
        return xlogy(P, r).sum(axis=1)
    if kind == "chi2":
        return ((r - 1) ** 2 * q[None, :]).sum(axis=1)
    if kind == "tv":
        return 0.5 * np.abs(P - q[None, :]).sum(axis=1)
    if kind == "h_alpha":
        return (np.abs(r - 1) ** alpha * q[None, :]).sum(axis=1)
    if kind == "hellinger":
        return ((r**alpha * q[None, :]).sum(axis=1) - 1) / (alpha - 1)
    raise ValueError(f"unknown divergence {kind!r}")


def _simplex_grid(m, steps):
    for c in itertools.combinations(range(steps + m - 1), m - 1):
        parts = np.diff((-1,) + c + (steps + m - 1,)) - 1
        yield parts / steps


def brute_force_sdpi(K, mu, kind="chi2", alpha=None, grid_points=None, refinements=60, seed=0, samples=4000):
    """Lower estimate of sup_nu D(nu K || mu K) / D(nu || mu) over nu != mu.

    Uses a simplex grid (1/200 for m=2, 1/60 for m=3, 1/24 for m=4) or random
    Dirichlet samples for larger m, then a shrinking-step coordinate search
    around the best points.
    """
    K = markov.validate_kernel(K)
    mu = markov.validate_prob(mu)
    m = K.shape[0]
    pushed = mu @ K
    kind = kind.lower()

    def ratios(N):
        num = _row_divergence(N @ K, pushed, kind, alpha)
        den = _row_divergence(N, mu, kind, alpha)
        far = np.abs(N - mu[None, :]).max(axis=1) > 1e-9
        out = np.where(far & (den > 0), num / np.where(den > 0, den, 1.0), -np.inf)
        return out

    if m <= 4:
        steps = grid_points or {2: 200, 3: 60, 4: 24}[m]
        N = np.array(list(_simplex_grid(m, steps)))
    else:
        rng = np.random.default_rng(seed)
        N = rng.dirichlet(np.ones(m), size=samples)
    # also probe small perturbations of mu, where chi-square type ratios peak
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(200, m))
    dirs -= dirs.mean(axis=1, keepdims=True)
    scale = 0.5 * mu.min() / np.abs(dirs).max(axis=1, keepdims=True)
    N = np.vstack([N, mu[None, :] + scale * dirs])
    vals = ratios(N)
    order = np.argsort(vals)[::-1][:5]
    best = float(vals[order[0]]) if np.isfinite(vals[order[0]]) else 0.0
    moves = [np.eye(m)[i] - np.eye(m)[j] for i in range(m) for j in range(m) if i != j]
    for start in order:
        nu = N[start].copy()
        cur = float(ratios(nu[None, :])[0])
        if not np.isfinite(cur):
            continue
        step = 0.05
        for _ in range(refinements):
            cand = np.array([nu + step * d for d in moves])
            cand = cand[(cand >= 0).all(axis=1)]
            improved = False
            if cand.size:
                cv = ratios(cand)
                k = int(np.argmax(cv))
                if cv[k] > cur:
                    nu, cur, improved = cand[k], float(cv[k]), True
            if not improved:
                step /= 2
        best = max(best, cur)
    return max(best, 0.0)
