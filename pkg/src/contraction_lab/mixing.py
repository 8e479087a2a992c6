"""Mixing times in Orlicz norms and event-probability bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import markov
from .contraction import conjugate_exponent, orlicz_contraction_bound
from .errors import NotReached, ZeroMass
from .orlicz import orlicz_norm


@dataclass(frozen=True)
class MixingReport:
    epsilon: float
    bound_steps: float  # an integer, or math.inf when the bound is vacuous
    psi: str
    flavor: str
    sup_nu_norm: float
    dual_contraction: float
    exact_steps: int | None = None

    @property
    def vacuous(self):
        return math.isinf(self.bound_steps)


def max_dirac_norm(pi, psi, flavor="L"):
    """Closed-form upper bound on max_x ||d delta_x / d pi - 1|| in the given flavor.

    The centred Dirac density equals (1 - pi(x)) / pi(x) at x and -1 elsewhere;
    the case split is on pi(x) >= 1/2.
    """
    pi = markov.validate_prob(pi)
    if np.any(pi <= 0):
        raise ZeroMass("pi must be strictly positive")
    flavor = flavor.upper()
    best = 0.0
    for w in pi:
        rest = 1.0 - w
        if rest <= 0:
            continue
        if flavor == "L":
            if w >= 0.5:
                v = 1.0 / float(psi.inverse(1.0 / (2 * rest)))
            else:
                v = (rest / w) / float(psi.inverse(1.0 / (2 * w)))
        elif flavor == "A":
            arg = 1.0 / (2 * rest) if w >= 0.5 else 1.0 / (2 * w)
            v = 2 * rest * float(psi.conjugate_inverse(arg))
        else:
            raise ValueError(f"flavor must be 'A' or 'L', got {flavor!r}")
        best = max(best, v)
    return best


def exact_dirac_norms(Kt, pi, psi, flavor="L"):
    """||delta_x K^t / pi - 1|| for every starting state x."""
    pi = np.asarray(pi, dtype=float)
    return np.array([orlicz_norm(row / pi - 1.0, pi, psi, flavor) for row in np.asarray(Kt)])


def mixing_time_bound(K, psi, flavor="L", epsilon=0.01, pi=None):
    """ceil(log(S / eps) / -log c), with S the Dirac-norm bound and c the dual contraction bound.

    Mixing times count steps t >= 1. A dual bound >= 1 gives bound_steps = inf.
    """
    K = markov.validate_kernel(K)
    pi = markov.stationary_distribution(K) if pi is None else markov.validate_prob(pi)
    sup_norm = max_dirac_norm(pi, psi, flavor)
    c = orlicz_contraction_bound(K, pi, psi, psi, flavor, "dual").value
    if c >= 1.0:
        steps = math.inf
    elif c <= 0.0 or sup_norm <= epsilon:
        steps = 1
    else:
        steps = max(1, math.ceil(math.log(sup_norm / epsilon) / -math.log(c) - 1e-12))
    return MixingReport(float(epsilon), steps, psi.name, flavor.upper(), float(sup_norm), float(c))


def exact_mixing_time(K, psi, flavor="L", epsilon=0.01, max_t=10_000, pi=None):
    """Smallest t >= 1 with max_x ||delta_x K^t / pi - 1|| <= epsilon."""
    K = markov.validate_kernel(K)
    pi = markov.stationary_distribution(K) if pi is None else markov.validate_prob(pi)
    Kt = np.eye(K.shape[0])
    for t in range(1, max_t + 1):
        Kt = Kt @ K
        if exact_dirac_norms(Kt, pi, psi, flavor).max() <= epsilon:
            return t
    raise NotReached(max_t)


# ---------------------------------------------------------------------------
# event probabilities


def event_bound_orlicz(pi_E, norm_value, psi, flavor=None):
    """Bound on P(E) under a law whose centred density has the given norm.

    Amemiya:    (norm + (psi*)^-1(1)) / (psi*)^-1(1 / pi(E))
    Luxemburg:  pi(E) psi^-1(1 / pi(E)) (norm + 1 / psi^-1(1))

    ``norm_value`` may be a float (with ``flavor`` 'A' or 'L') or a dict
    {'A': ..., 'L': ...}; with both flavors the smaller bound is returned.
    """
    if not 0 < pi_E <= 1:
        raise ValueError("pi(E) must lie in (0, 1]")
    norms = dict(norm_value) if isinstance(norm_value, dict) else {flavor.upper(): float(norm_value)}
    out = math.inf
    for fl, value in norms.items():
        fl = fl.upper()
        if fl == "A":
            b = (value + float(psi.conjugate_inverse(1.0))) / float(psi.conjugate_inverse(1.0 / pi_E))
        elif fl == "L":
            b = pi_E * float(psi.inverse(1.0 / pi_E)) * (value + 1.0 / float(psi.inverse(1.0)))
        else:
            raise ValueError(f"flavor must be 'A' or 'L', got {fl!r}")
        out = min(out, b)
    return out


def event_bound_lp(pi_E, epsilon, p):
    """pi(E)^(1/q) (pi(E)^(1/p) + eps) with q = p / (p - 1)."""
    if not 0 < pi_E <= 1:
        raise ValueError("pi(E) must lie in (0, 1]")
    q = conjugate_exponent(p)
    return pi_E ** (1.0 / q) * (pi_E ** (1.0 / p) + epsilon)


def hoeffding_tail(n, eta, C):
    """2 exp(-2 n eta^2 / C^2), the stationary bounded-difference tail."""
    return 2.0 * math.exp(-2.0 * n * eta**2 / C**2)


def mixed_hoeffding_bound(n, eta, C, epsilon, p):
    """Event bound with pi(E) replaced by the Hoeffding tail: the L_p route after mixing."""
    q = conjugate_exponent(p)
    return hoeffding_tail(n, eta, C) + epsilon * 2.0 ** (1.0 / q) * math.exp(-2.0 * n * eta**2 / (q * C**2))


def exponential_epsilon(n, eta, C, p):
    """The largest radius eps = exp(n eta^2 / (q C^2)) that keeps the second term exponentially small."""
    q = conjugate_exponent(p)
    return math.exp(n * eta**2 / (q * C**2))


def mixing_steps_for_exponential_rate(dual_contraction, sup_norm, n, eta, C, p):
    """Steps after which the norm is below exponential_epsilon(n, eta, C, p).

    Equals (log S - n eta^2 / (q C^2)) / -log c, floored at 0.
    """
    q = conjugate_exponent(p)
    if dual_contraction >= 1:
        return math.inf
    if dual_contraction <= 0:
        return 0.0
    return max(0.0, (math.log(sup_norm) - n * eta**2 / (q * C**2)) / -math.log(dual_contraction))
