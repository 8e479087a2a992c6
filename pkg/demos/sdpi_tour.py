"""Strong data-processing constants for chi^2 and KL on small graphs."""
import math

import numpy as np

from contraction_lab import markov, sdpi
from contraction_lab.orlicz import chi2, kl

g = markov.Graph.path(3)
pi = markov.graph_stationary(g)
print("lazy walk on the 3-vertex path: chi^2 constant")
print("  lambda  bound   brute force  Dobrushin")
for lam in (0.2, 0.4, 0.5, 0.7, 1.0):
    K = markov.graph_walk(g, lam)
    bound = sdpi.graph_chi2_bound(g, lam)
    oracle = sdpi.brute_force_sdpi(K, pi, "chi2")
    print(f"  {lam:<6}  {bound:.4f}  {oracle:.4f}       {sdpi.dobrushin_eta_tv(K):.4f}")

# at lambda = 1/2 a whole family of inputs attains the ratio 1/4
K = markov.graph_walk(g, 0.5)
nu = np.array([0.1, 0.5, 0.4])
print(f"  ratio at nu={nu}: {chi2(nu @ K, pi) / chi2(nu, pi):.4f}")

print("\nKL on the complete graph, worst-case input (values above 1 say nothing)")
for n in (3, 10):
    print(f"  |V|={n}")
    for lam in np.linspace(0, (n - 1) / n, 6, endpoint=False):
        ours, rag = sdpi.graph_kl_bounds(n, float(lam))
        print(f"    lambda={lam:.3f}  ours {ours:.4f}  Hoeffding baseline {rag:.4f}")

print("\nbinary channel, KL contraction for one input")
lam, kappa, p = 0.1, 0.1, 0.4
K = markov.general_binary(lam, kappa)
mu = np.array([p, 1 - p])
nu = np.array([0.1, 0.9])
bound, _ = sdpi.kl_sdpi_bound(K, mu, nu)
print(f"  D(nu K || mu K) = {kl(nu @ K, mu @ K):.5f} <= {bound:.5f}"
      f"  (sub-Gaussian route: {sdpi.subgaussian_sdpi_bound(K, mu) * kl(nu, mu):.5f})")
print(f"  log 2 = {math.log(2):.4f} is the largest KL from the uniform law on 2 states")
