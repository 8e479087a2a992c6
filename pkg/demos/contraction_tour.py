"""Contraction coefficients on a few small chains.

Run from the repository root: python demos/contraction_tour.py
"""
import os

import numpy as np

from contraction_lab import contraction as con
from contraction_lab import markov, mixing
from contraction_lab.orlicz import HeavyTail, Power, SubGaussian

DATA = os.path.join(os.path.dirname(__file__), "data")

K, mu = markov.load_kernel_file(os.path.join(DATA, "ex3x3.json"))
print("3x3 kernel, uniform stationary law")
print(f"  exact L2 contraction  {con.exact_l2_contraction(K, mu):.8f}")
print(f"  closed-form L2 bound  {con.lp_contraction_bound(K, mu, 2).value:.8f}")
for p in (1.5, 4.0, 20.0):
    print(f"  {f'L_{p:g} bound':<20}  {con.lp_contraction_bound(K, mu, p).value:.6f}")
for psi in (SubGaussian(), Power(3)):
    print(f"  {psi.name:<20}  {con.orlicz_contraction_bound(K, mu, psi).value:.6f}")

# binary chains: the L2 bound is exact
lam, kappa = 0.2, 0.35
B = markov.general_binary(lam, kappa)
pi = markov.stationary_distribution(B)
print(f"\nbinary chain ({lam}, {kappa}): bound {con.lp_contraction_bound(B, pi, 2).value:.6f}, |1-lam-kappa| {abs(1 - lam - kappa):.6f}")

print("\nL_100 norm of K^10 - 1_pi on random 5x5 kernels")
print("  seed   ours      interpolated")
for seed in range(5):
    R = markov.random_stochastic(5, seed)
    pi = markov.stationary_distribution(R)
    ours = con.lp_contraction_bound(markov.t_step(R, 10), pi, 100).value
    rt = con.riesz_thorin_baseline(con.exact_l2_contraction(R, pi), 100, 10)
    print(f"  {seed:<5}  {ours:.2e}  {rt:.3f}")

print("\nmixing time of BSC(0.1) in L2 to radius 0.01")
report = mixing.mixing_time_bound(markov.bsc(0.1), Power(2), "L", 0.01)
exact = mixing.exact_mixing_time(markov.bsc(0.1), Power(2), "L", 0.01)
print(f"  bound {report.bound_steps} steps, exact {exact} steps")

print("\nprobability of a rare event with pi(E) = n^-2.1, start at distance 1")
psi = HeavyTail(5, 5)
for n in (10, 100, 1000):
    pE = n**-2.1
    lp = mixing.event_bound_lp(pE, 1.0, 1.09)
    heavy = mixing.event_bound_orlicz(pE, 1.0, psi, "L")
    print(f"  n={n:<5} L_1.09 {lp:.3e}   heavy-tail Young {heavy:.3e}")
