"""Young functions, Orlicz norms over discrete measures, divergences and rho.

All functions of a finite state space are numpy vectors paired with a
probability vector ``mu`` of the same length.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.special import lambertw, logsumexp, xlogy

from .errors import (
    AbsoluteContinuityViolation,
    BracketFailure,
    DegenerateInfimum,
    NonFinite,
)

INF_EXPONENT = 1e6  # exponents at or above this are treated as infinity
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# one-dimensional helpers


def _increasing_inverse(g, y, largest=False, max_iter=400):
    """Generalised inverse of a nondecreasing g on [0, inf).

    Returns inf{x >= 0 : g(x) >= y}, or sup{x >= 0 : g(x) <= y} when
    ``largest`` is set; the two only differ on flat stretches of g.
    """
    if y <= 0 and not largest:
        return 0.0
    if math.isinf(y):
        return math.inf
    lo, hi = 0.0, 1.0
    while g(hi) <= y if largest else g(hi) < y:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            return math.inf
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if (g(mid) <= y) if largest else (g(mid) < y):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return lo if largest else hi


def _golden_min(h, a, b, tol=1e-12, max_iter=200):
    """Golden-section search for a minimiser of a unimodal h on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    hc, hd = h(c), h(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if hc <= hd:
            b, d, hd = d, c, hc
            c = b - _GOLDEN * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + _GOLDEN * (b - a)
            hd = h(d)
    return (c, hc) if hc <= hd else (d, hd)


def _grid_then_golden(h, lo, hi, n_grid=400, tol=1e-12):
    """Minimise h over [lo, hi] (log-coordinates) by a grid scan plus golden refinement.

    Returns (argmin, min, index_of_grid_min, grid_size).
    """
    grid = np.linspace(lo, hi, n_grid)
    vals = np.array([h(s) for s in grid])
    vals = np.where(np.isnan(vals), np.inf, vals)
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n_grid - 1)]
    s, v = _golden_min(h, a, b, tol=tol)
    if vals[i] < v:
        s, v = grid[i], vals[i]
    return s, v, i, n_grid


def _as_scalar_fn(fn):
    def wrapped(self, y):
        if np.ndim(y) == 0:
            return fn(self, float(y))
        return np.vectorize(lambda v: fn(self, float(v)), otypes=[float])(y)

    wrapped.__doc__ = fn.__doc__
    wrapped.__name__ = fn.__name__
    return wrapped


# ---------------------------------------------------------------------------
# Young functions


class YoungFunction:
    """Base class: nondecreasing psi on [0, inf) with psi(0) = 0.

    Subclasses implement ``eval`` and may override ``inverse``, ``conjugate``
    and ``conjugate_inverse`` with closed forms. The defaults are numeric.
    ``convex`` is False for the two built-ins that are used like Young
    functions but are not convex (TildePhi and HeavyTail).
    """

    name = "young"
    convex = True
    domain_hint = 1e300

    def eval(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    @_as_scalar_fn
    def inverse(self, y):
        return _increasing_inverse(lambda x: float(self.eval(x)), y)

    @_as_scalar_fn
    def conjugate(self, y):
        """sup over lam >= 0 of lam*y - psi(lam), by grid plus golden section in log lam."""
        if y <= 0:
            return 0.0

        def neg(s):
            lam = math.exp(s)
            with np.errstate(over="ignore"):
                v = float(self.eval(lam))
            return -(lam * y - v)

        _, v, _, _ = _grid_then_golden(neg, math.log(1e-10), math.log(1e10))
        return max(0.0, -v)

    @_as_scalar_fn
    def conjugate_inverse(self, y):
        return _increasing_inverse(lambda z: float(self.conjugate(z)), y, largest=True)

    def conjugate_function(self):
        return ConjugateYoung(self)


class ConjugateYoung(YoungFunction):
    """psi* packaged as a Young function in its own right."""

    def __init__(self, base):
        self.base = base
        self.name = f"conj({base.name})"

    def eval(self, x):
        return self.base.conjugate(np.abs(x))

    def inverse(self, y):
        return self.base.conjugate_inverse(y)

    def conjugate(self, y):
        # psi** = psi for convex lower semicontinuous psi
        if self.base.convex:
            return self.base.eval(y)
        return YoungFunction.conjugate(self, y)

    def conjugate_inverse(self, y):
        if self.base.convex:
            return self.base.inverse(y)
        return YoungFunction.conjugate_inverse(self, y)

    def conjugate_function(self):
        return self.base if self.base.convex else ConjugateYoung(self)


class Monomial(YoungFunction):
    """psi(x) = coef * |x|^power, with power in [1, inf].

    power = inf is the indicator of [0, 1] (0 inside, inf outside), the Young
    function of L_infinity. power = 1 is linear; its conjugate is the
    indicator of [0, coef].
    """

    def __init__(self, power, coef=1.0, name=None):
        power = float(power)
        if power < 1:
            raise ValueError("exponent must be >= 1")
        self.power = math.inf if power >= INF_EXPONENT else power
        self.coef = float(coef)
        if self.coef <= 0:
            raise ValueError("coefficient must be positive")
        self.name = name or f"monomial:{self.power:g}:{self.coef:g}"
        self.domain_hint = math.inf if self.power == math.inf else 1e300 ** (1.0 / self.power)

    def eval(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        r = self.power
        if r == math.inf:
            out = np.where(a <= 1.0, 0.0, math.inf)
        else:
            with np.errstate(over="ignore", divide="ignore"):
                out = np.where(a > 0, np.exp(math.log(self.coef) + r * np.log(np.where(a > 0, a, 1.0))), 0.0)
        return out if out.ndim else float(out)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if self.power == math.inf:
            out = np.where(y > 0, np.where(y < math.inf, 1.0, math.inf), 0.0)
        else:
            out = np.power(np.clip(y, 0, None) / self.coef, 1.0 / self.power)
        return out if out.ndim else float(out)

    def _dual_params(self):
        """(power, coef) of the conjugate, or None for the indicator cases."""
        r, c = self.power, self.coef
        if r == 1 or r == math.inf:
            return None
        s = r / (r - 1.0)
        return s, (r - 1.0) * c * (c * r) ** (-s)

    def conjugate(self, y):
        y = np.abs(np.asarray(y, dtype=float))
        if self.power == math.inf:
            out = y.copy()
        elif self.power == 1:
            out = np.where(y <= self.coef, 0.0, math.inf)
        else:
            s, c = self._dual_params()
            with np.errstate(over="ignore"):
                out = c * np.power(y, s)
        return out if out.ndim else float(out)

    def conjugate_inverse(self, y):
        y = np.asarray(y, dtype=float)
        if self.power == math.inf:
            out = np.clip(y, 0, None)
        elif self.power == 1:
            out = np.where(y >= 0, self.coef, 0.0)
        else:
            s, c = self._dual_params()
            out = np.power(np.clip(y, 0, None) / c, 1.0 / s)
        return out if out.ndim else float(out)

    def conjugate_function(self):
        if self.power == math.inf:
            return Monomial(1.0, 1.0, name=f"conj({self.name})")
        if self.power == 1:
            # indicator of [0, coef] is the L_inf Young function rescaled
            return _ScaledIndicator(self.coef, name=f"conj({self.name})")
        s, c = self._dual_params()
        return Monomial(s, c, name=f"conj({self.name})")


class _ScaledIndicator(Monomial):
    """0 on [0, width], inf beyond. Conjugate of the linear function width * x."""

    def __init__(self, width, name=None):
        super().__init__(math.inf, 1.0, name=name or f"indicator:{width:g}")
        self.width = float(width)

    def eval(self, x):
        out = np.where(np.abs(np.asarray(x, dtype=float)) <= self.width, 0.0, math.inf)
        return out if out.ndim else float(out)

    def inverse(self, y):
        out = np.where(np.asarray(y, dtype=float) > 0, self.width, 0.0)
        return out if out.ndim else float(out)

    def conjugate(self, y):
        return self.width * np.abs(y)

    def conjugate_inverse(self, y):
        return np.clip(np.asarray(y, dtype=float), 0, None) / self.width

    def conjugate_function(self):
        return Monomial(1.0, self.width)


def Power(p):
    """|x|^p; its Luxemburg norm is the L_p norm."""
    return Monomial(p, 1.0, name=f"power:{float(p):g}")


def ScaledPower(p):
    """|x|^p / p, whose conjugate is |y|^q / q with q = p / (p - 1)."""
    if float(p) >= INF_EXPONENT:
        raise ValueError("scaled power needs a finite exponent")
    return Monomial(p, 1.0 / float(p), name=f"scaled-power:{float(p):g}")


class SubGaussian(YoungFunction):
    """exp(x^2) - 1."""

    name = "subgaussian"
    domain_hint = math.sqrt(709.0)

    def eval(self, x):
        a = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            out = np.expm1(a * a)
        return out if out.ndim else float(out)

    def inverse(self, y):
        out = np.sqrt(np.log1p(np.clip(np.asarray(y, dtype=float), 0, None)))
        return out if out.ndim else float(out)

    def conjugate(self, y):
        # the maximiser solves y = 2 lam exp(lam^2), i.e. 2 lam^2 = W(y^2 / 2)
        y = np.abs(np.asarray(y, dtype=float))
        lam = np.sqrt(np.real(lambertw(y * y / 2.0)) / 2.0)
        out = np.maximum(y * lam - np.expm1(lam * lam), 0.0)
        return out if out.ndim else float(out)


def entropy_phi(x):
    """(1 + x) log(1 + x) - x for x >= -1."""
    x = np.asarray(x, dtype=float)
    out = xlogy(1.0 + x, 1.0 + x) - x
    return out if out.ndim else float(out)


TILDE_BREAK = math.e - 1.0


def tilde_phi(x):
    """Symmetrised x log x function used on the region where dnuK/dmuK < 1.

    Equals entropy_phi(-|x|) for |x| < 1, the constant 1 on [1, e - 1], and
    entropy_phi(x) beyond e - 1. Defined for x >= -1.
    """
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    inner = np.clip(1.0 - a, 0.0, None)
    low = xlogy(inner, inner) + a
    out = np.where(x < 1.0, low, np.where(x <= TILDE_BREAK, 1.0, entropy_phi(np.maximum(x, 0.0))))
    return out if out.ndim else float(out)


class EntropyPhi(YoungFunction):
    """(1 + x) log(1 + x) - x, with conjugate exp(y) - y - 1."""

    name = "entropy-phi"

    def eval(self, x):
        return entropy_phi(np.abs(x))

    def conjugate(self, y):
        y = np.abs(np.asarray(y, dtype=float))
        with np.errstate(over="ignore"):
            out = np.expm1(y) - y
        return out if out.ndim else float(out)


class TildePhi(YoungFunction):
    """tilde_phi restricted to [0, inf). Nondecreasing but flat on [1, e - 1], so not convex."""

    name = "tilde-phi"
    convex = False

    def eval(self, x):
        return tilde_phi(np.abs(x))


class HeavyTail(YoungFunction):
    """x^m up to k, then an x log x tail shifted to keep the function continuous.

    Not convex: the slope drops from m k^(m-1) to 1 + log(1 + k) at x = k.
    """

    convex = False

    def __init__(self, k=5.0, m=5.0):
        self.k, self.m = float(k), float(m)
        if self.k <= 0 or self.m < 1:
            raise ValueError("need k > 0 and m >= 1")
        self.name = f"heavy:{self.k:g}:{self.m:g}"
        self._offset = self.k**self.m - (1 + self.k) * math.log1p(self.k)

    def eval(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        with np.errstate(over="ignore"):
            out = np.where(a <= self.k, a**self.m, xlogy(1 + a, 1 + a) + self._offset)
        return out if out.ndim else float(out)

    @_as_scalar_fn
    def inverse(self, y):
        if y <= 0:
            return 0.0
        if y <= self.k**self.m:
            return y ** (1.0 / self.m)
        # (1 + x) log(1 + x) = z  =>  1 + x = z / W(z)
        z = y - self._offset
        w = float(np.real(lambertw(z)))
        return z / w - 1.0

    @_as_scalar_fn
    def conjugate(self, y):
        """Exact: each piece is convex, so take its stationary point clipped to the piece."""
        if y <= 0:
            return 0.0
        k, m = self.k, self.m
        cands = [0.0, k]
        if m > 1:
            cands.append(min((y / m) ** (1.0 / (m - 1.0)), k))
        # tail: y = 1 + log(1 + lam)
        tail = math.expm1(y - 1.0) if y < 700 else math.inf
        if tail > k:
            cands.append(tail)
        if math.isinf(tail):
            return math.inf
        return max(0.0, max(lam * y - float(self.eval(lam)) for lam in cands))


def young_from_string(spec):
    """Parse the CLI names power:p, scaled-power:p, subgaussian, entropy-phi, tilde-phi, heavy:k:m."""
    parts = spec.strip().lower().split(":")
    head, args = parts[0], parts[1:]
    try:
        if head == "power" and len(args) == 1:
            return Power(float(args[0]) if args[0] not in ("inf", "infinity") else math.inf)
        if head == "scaled-power" and len(args) == 1:
            return ScaledPower(float(args[0]))
        if head == "heavy" and len(args) == 2:
            return HeavyTail(float(args[0]), float(args[1]))
        if not args and head in _NAMED:
            return _NAMED[head]()
    except ValueError as exc:
        raise ValueError(f"bad Young function {spec!r}: {exc}") from None
    raise ValueError(f"unknown Young function {spec!r}")


_NAMED = {"subgaussian": SubGaussian, "entropy-phi": EntropyPhi, "tilde-phi": TildePhi}


def young_eval(psi, x):
    return psi.eval(x)


def young_inverse(psi, y):
    return psi.inverse(y)


def young_conjugate(psi, y):
    return psi.conjugate(y)


# ---------------------------------------------------------------------------
# norms


def _prepare(f, mu):
    f = np.abs(np.asarray(f, dtype=float))
    mu = np.asarray(mu, dtype=float)
    if f.shape != mu.shape:
        raise ValueError(f"function has shape {f.shape}, measure {mu.shape}")
    if not np.all(np.isfinite(f)):
        raise NonFinite("function has non-finite values")
    keep = mu > 0
    return f[keep], mu[keep]


def lp_norm(f, mu, p):
    """L_p(mu) norm, in log-sum-exp form; p >= 1e6 means the max over the support."""
    a, w = _prepare(f, mu)
    if a.size == 0 or not np.any(a > 0):
        return 0.0
    p = float(p)
    if p >= INF_EXPONENT:
        return float(a.max())
    if p == 1.0:
        return float(np.dot(w, a))
    pos = a > 0
    return float(np.exp(logsumexp(p * np.log(a[pos]) + np.log(w[pos])) / p))


def luxemburg_norm(f, mu, psi, closed_form=True):
    """inf{sigma > 0 : mu(psi(|f| / sigma)) <= 1}.

    Monomials use the exact L_p expression; everything else, or
    ``closed_form=False``, goes through bisection on sigma.
    """
    a, w = _prepare(f, mu)
    if a.size == 0 or not np.any(a > 0):
        return 0.0
    if closed_form and isinstance(psi, Monomial) and not isinstance(psi, _ScaledIndicator):
        r = psi.power
        if r == math.inf:
            return float(a.max())
        return psi.coef ** (1.0 / r) * lp_norm(a, w, r)

    def excess(sigma):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return float(np.dot(w, psi.eval(a / sigma)))

    top = float(a.max())
    inv_one = float(psi.inverse(1.0))
    hi = top / inv_one if inv_one > 0 else 1.0
    while excess(hi) > 1.0:
        hi *= 2.0
    inv_min = float(psi.inverse(1.0 / w.min()))
    lo = top / inv_min if 0 < inv_min < math.inf else 1e-12
    lo = min(lo, hi)
    if excess(lo) <= 1.0:
        # lo already feasible: it is also a lower bound, so it is the answer
        return lo
    for _ in range(300):
        if hi - lo <= 1e-11 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if excess(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def amemiya_norm(f, mu, psi, closed_form=True):
    """inf over t > 0 of (1 + mu(psi(t |f|))) / t."""
    a, w = _prepare(f, mu)
    if a.size == 0 or not np.any(a > 0):
        return 0.0
    if closed_form and isinstance(psi, Monomial) and not isinstance(psi, _ScaledIndicator):
        r, c = psi.power, psi.coef
        if r == math.inf:
            return float(a.max())
        if r == 1.0:
            return c * float(np.dot(w, a))
        log_factor = math.log(r) - math.log(r - 1.0) + (math.log(c) + math.log(r - 1.0)) / r
        return math.exp(log_factor) * lp_norm(a, w, r)
    scale = float(a.max())
    g = a / scale

    def objective(s):
        t = math.exp(s)
        with np.errstate(over="ignore", invalid="ignore"):
            v = float(np.dot(w, psi.eval(t * g)))
        return (1.0 + v) / t

    lo, hi = math.log(1e-8), math.log(1e8)
    _, v, i, n = _grid_then_golden(objective, lo, hi, tol=1e-13)
    if i == n - 1:
        raise BracketFailure(f"no interior minimum of the Amemiya objective for {psi.name}")
    return scale * v


def orlicz_norm(f, mu, psi, flavor):
    """Dispatch on the norm flavor: 'L' (Luxemburg) or 'A' (Amemiya)."""
    flavor = flavor.upper()
    if flavor == "L":
        return luxemburg_norm(f, mu, psi)
    if flavor == "A":
        return amemiya_norm(f, mu, psi)
    raise ValueError(f"flavor must be 'A' or 'L', got {flavor!r}")


def dual_flavor(flavor):
    return {"A": "L", "L": "A"}[flavor.upper()]


def holder_product_bound(u, v, mu, psi):
    """(mu(u v), Luxemburg(u; psi) * Amemiya(v; psi*)) for nonnegative u, v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    lhs = float(np.dot(mu, u * v))
    if not np.any(u) or not np.any(v):
        return lhs, 0.0
    rhs = luxemburg_norm(u, mu, psi) * amemiya_norm(v, mu, psi.conjugate_function())
    return lhs, rhs


# ---------------------------------------------------------------------------
# rho functional


def rho_functional(f, mu, c, full_output=False):
    """inf over t > 0 of (c + log mu(exp(t (f - mu f)))) / t.

    Emits DegenerateInfimum and returns 0 when f is constant on the support.
    When no interior minimiser exists the infimum is the limit max(f - mu f).
    ``full_output`` also returns the minimising t (inf for the limit case).
    """
    if not c > 0:
        raise ValueError("rho needs c > 0")
    f = np.asarray(f, dtype=float)
    mu = np.asarray(mu, dtype=float)
    keep = mu > 0
    f, w = f[keep], mu[keep]
    h = f - np.dot(w, f)
    scale = float(np.abs(h).max()) if h.size else 0.0
    if scale <= 1e-14 * (1.0 + float(np.abs(f).max(initial=0.0))):
        warnings.warn("rho of a constant function is the limit 0", DegenerateInfimum, stacklevel=2)
        return (0.0, math.inf) if full_output else 0.0
    g = h / scale
    top = float(g.max())
    logw = np.log(w)

    # dense vectorised scan first, then golden refinement near the best point
    grid = np.linspace(math.log(1e-8), math.log(1e8), 10_000)
    ts = np.exp(grid)
    vals = (c + logsumexp(ts[:, None] * g[None, :] + logw[None, :], axis=1)) / ts
    i = int(np.argmin(vals))

    def objective(s):
        t = math.exp(s)
        return (c + float(logsumexp(t * g + logw))) / t

    s, v = _golden_min(objective, grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)], tol=1e-13)
    if vals[i] < v:
        s, v = grid[i], float(vals[i])
    t_opt = math.exp(s) / scale
    if top <= v:
        v, t_opt = top, math.inf
    value = scale * v
    return (value, t_opt) if full_output else value


# ---------------------------------------------------------------------------
# divergences


def divergence(nu, mu, kind, alpha=None):
    """phi-divergence of nu from mu.

    kind is one of 'kl', 'chi2', 'tv', 'hellinger' (needs alpha, the
    (x^alpha - 1)/(alpha - 1) divergence) and 'h_alpha' (needs alpha,
    ||dnu/dmu - 1||_{L_alpha(mu)}^alpha).
    """
    nu = np.asarray(nu, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if nu.shape != mu.shape:
        raise ValueError("nu and mu must have the same length")
    if np.any((mu <= 0) & (nu > 0)):
        raise AbsoluteContinuityViolation("nu charges a state that mu does not")
    keep = mu > 0
    nu, mu = nu[keep], mu[keep]
    r = nu / mu
    kind = kind.lower()
    if kind == "kl":
        return float(np.sum(xlogy(nu, r)))
    if kind == "chi2":
        return float(np.dot(mu, (r - 1.0) ** 2))
    if kind == "tv":
        return 0.5 * float(np.abs(nu - mu).sum())
    if alpha is None:
        raise ValueError(f"{kind} needs alpha")
    alpha = float(alpha)
    if kind == "hellinger":
        if alpha == 1.0:
            return float(np.sum(xlogy(nu, r)))
        return (float(np.dot(mu, r**alpha)) - 1.0) / (alpha - 1.0)
    if kind == "h_alpha":
        return lp_norm(r - 1.0, mu, alpha) ** alpha
    raise ValueError(f"unknown divergence {kind!r}")


def kl(nu, mu):
    return divergence(nu, mu, "kl")


def chi2(nu, mu):
    return divergence(nu, mu, "chi2")


def tv(nu, mu):
    return divergence(nu, mu, "tv")
