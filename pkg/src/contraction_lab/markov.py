"""Finite-state Markov kernels.

A kernel is an m x m row-stochastic numpy array with ``K[x, y] = K(y | x)``.
It acts on measures from the right (``mu @ K``) and on functions from the
left (``K @ f``).
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedGraph,
    NegativeEntry,
    NonFinite,
    NonSquare,
    NonUniqueStationary,
    RowSumViolation,
    ZeroMass,
    ZeroPushedMass,
)

ROW_SUM_TOL = 1e-10
RANK_TOL = 1e-8


def validate_kernel(raw, tol=ROW_SUM_TOL):
    """Return a validated float copy of a row-stochastic matrix."""
    K = np.array(raw, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise NonSquare(f"kernel must be square, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise NonFinite("kernel has non-finite entries")
    if np.any(K < 0):
        raise NegativeEntry(f"kernel has negative entry {K.min():.3g}")
    if np.any(K > 1 + tol):
        raise RowSumViolation("kernel entry exceeds 1")
    dev = np.abs(K.sum(axis=1) - 1.0).max()
    if dev > tol:
        raise RowSumViolation(f"row sums deviate from 1 by {dev:.3g}")
    return K


def validate_prob(raw, tol=ROW_SUM_TOL):
    """Return a validated float copy of a probability vector."""
    p = np.array(raw, dtype=float)
    if p.ndim != 1:
        raise ValueError("probability vector must be one-dimensional")
    if not np.all(np.isfinite(p)):
        raise NonFinite("probability vector has non-finite entries")
    if np.any(p < 0):
        raise NegativeEntry("probability vector has a negative weight")
    if abs(p.sum() - 1.0) > tol:
        raise RowSumViolation(f"weights sum to {p.sum()!r}, not 1")
    return p


def stationary_distribution(K):
    """Unique stationary distribution via a dense solve of pi (K - I) = 0."""
    K = validate_kernel(K)
    m = K.shape[0]
    A = K.T - np.eye(m)
    s = np.linalg.svd(A, compute_uv=False)
    nullity = int(np.sum(s <= RANK_TOL * max(1.0, s[0])))
    if nullity > 1:
        raise NonUniqueStationary(f"stationary space has dimension {nullity}")
    # Replace one redundant balance equation by the normalisation.
    A[-1, :] = 1.0
    b = np.zeros(m)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def dual_kernel(K, mu):
    """Adjoint kernel K*(x|y) = K(y|x) mu(x) / (mu K)(y), returned as K*[y, x]."""
    K = validate_kernel(K)
    mu = validate_prob(mu)
    pushed = mu @ K
    if np.any(pushed <= 0):
        raise ZeroPushedMass("mu K has a zero-mass state")
    return (K * mu[:, None]).T / pushed[:, None]


def t_step(K, t):
    """The t-step kernel K^t."""
    if t < 0 or int(t) != t:
        raise ValueError("t must be a nonnegative integer")
    return np.linalg.matrix_power(validate_kernel(K), int(t))


@dataclass(frozen=True)
class KernelDensities:
    """Radon-Nikodym derivatives of a kernel against mu and mu K.

    ``forward[x, y] = g_x(y) = K(y|x) / muK(y)`` and
    ``dual[y, x] = g_y(x) = K*(x|y) / mu(x)``. In the finite case these two
    matrices are transposes of each other.
    """

    forward: np.ndarray
    dual: np.ndarray
    base_measure: np.ndarray
    pushed_measure: np.ndarray


def densities(K, mu):
    K = validate_kernel(K)
    mu = validate_prob(mu)
    if np.any(mu <= 0):
        raise ZeroMass("densities need a strictly positive base measure")
    pushed = mu @ K
    if np.any(pushed <= 0):
        raise ZeroPushedMass("mu K has a zero-mass state")
    forward = K / pushed[None, :]
    return KernelDensities(forward, forward.T.copy(), mu, pushed)


def _expm(A, order=12):
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    norm = np.abs(A).sum(axis=0).max()
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    B = A / 2.0**squarings
    term = np.eye(A.shape[0])
    out = term.copy()
    for k in range(1, order + 1):
        term = term @ B / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


@dataclass(frozen=True)
class Semigroup:
    kernel: np.ndarray
    time: float
    matrix: np.ndarray


def semigroup(K, t):
    """H_t = exp(-t (I - K)), the continuous-time chain jumping at rate 1."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    K = validate_kernel(K)
    H = _expm(-t * (np.eye(K.shape[0]) - K))
    H[(H < 0) & (H > -1e-14)] = 0.0
    return Semigroup(K, float(t), H)


# Builders


def general_binary(lam, kappa):
    """Two-state kernel [[1 - lam, lam], [kappa, 1 - kappa]]."""
    if not (0 <= lam <= 1 and 0 <= kappa <= 1):
        raise ValueError("lam and kappa must lie in [0, 1]")
    return np.array([[1 - lam, lam], [kappa, 1 - kappa]], dtype=float)


def bsc(lam):
    """Binary symmetric channel with crossover probability lam."""
    return general_binary(lam, lam)


def independence_kernel(pi):
    """Every row equals pi: one step forgets the starting point."""
    pi = validate_prob(pi)
    return np.tile(pi, (pi.size, 1))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n_vertices-1."""

    n_vertices: int
    edges: tuple

    def __post_init__(self):
        cleaned = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError("self-loops are not allowed")
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ValueError(f"edge ({a}, {b}) out of range")
            cleaned.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(cleaned)))

    @classmethod
    def complete(cls, n):
        return cls(n, tuple((a, b) for a in range(n) for b in range(a + 1, n)))

    @classmethod
    def path(cls, n):
        return cls(n, tuple((a, a + 1) for a in range(n - 1)))

    def neighbours(self):
        nbrs = [[] for _ in range(self.n_vertices)]
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return nbrs

    def degrees(self):
        return np.array([len(n) for n in self.neighbours()], dtype=float)

    def is_connected(self):
        nbrs = self.neighbours()
        seen = {0}
        queue = deque([0])
        while queue:
            for b in nbrs[queue.popleft()]:
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        return len(seen) == self.n_vertices


def graph_walk(graph, lam):
    """Lazy random walk: stay with prob 1 - lam, else move to a uniform neighbour."""
    if not 0 <= lam <= 1:
        raise ValueError("lam must lie in [0, 1]")
    if graph.n_vertices < 2 or not graph.is_connected():
        raise DisconnectedGraph("graph walk needs a connected graph with >= 2 vertices")
    deg = graph.degrees()
    K = np.diag(np.full(graph.n_vertices, 1.0 - lam))
    for a, b in graph.edges:
        K[a, b] += lam / deg[a]
        K[b, a] += lam / deg[b]
    return K


def graph_stationary(graph):
    """deg(x) / 2|E|, the stationary law of every lazy walk on the graph."""
    deg = graph.degrees()
    return deg / deg.sum()


def random_stochastic(m, seed, rows="simplex"):
    """m x m random kernel.

    rows="simplex" draws each row uniformly on the simplex (normalised Exp(1));
    rows="uniform" normalises Uniform(0, 1) entries, which concentrates rows
    nearer the centre of the simplex.
    """
    rng = np.random.default_rng(seed)
    if rows == "simplex":
        E = rng.exponential(size=(m, m))
    elif rows == "uniform":
        E = rng.random((m, m))
    else:
        raise ValueError(f"rows must be 'simplex' or 'uniform', got {rows!r}")
    return E / E.sum(axis=1, keepdims=True)


# File format


def load_kernel_file(path):
    """Read ``{"matrix": [[...]], "mu": [...]}``; mu defaults to stationary."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "matrix" not in data:
        raise ValueError(f"{path}: expected a JSON object with a 'matrix' key")
    K = validate_kernel(data["matrix"])
    mu = data.get("mu")
    mu = stationary_distribution(K) if mu is None else validate_prob(mu)
    if mu.size != K.shape[0]:
        raise ValueError(f"{path}: mu has length {mu.size}, kernel has {K.shape[0]} states")
    return K, mu


def dump_kernel(K, mu=None):
    data = {"matrix": [[float(v) for v in row] for row in np.asarray(K)]}
    if mu is not None:
        data["mu"] = [float(v) for v in mu]
    return json.dumps(data, indent=2) + "\n"
