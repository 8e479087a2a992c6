"""Tail bounds for averages along a Markov chain, checked against simulation."""
import json
import os

import numpy as np

from contraction_lab import concentration as conc
from contraction_lab import markov

DATA = os.path.join(os.path.dirname(__file__), "data")

with open(os.path.join(DATA, "binary_scenario.json")) as fh:
    raw = json.load(fh)
print("scenario file:", raw)

lam, kappa, eta = 1 / 3, 1 / 4, 0.65
K = markov.general_binary(lam, kappa)
pi = markov.stationary_distribution(K)
print(f"\nbinary chain ({lam:.3f}, {kappa}), eta={eta}")
print("  t    ours       Paulin     Fan        Marton")
for t in (2, 5, 10, 20, 50):
    ours = conc.markov_mcdiarmid_bound(conc.ConcentrationScenario(K, pi, t, eta))
    paulin, fan, marton = conc.literature_baselines(lam, kappa, t, eta)
    print(f"  {t:<4} {ours:.3e}  {paulin:.3e}  {fan:.3e}  {marton:.3e}")

print("\nsimulated tails against the bound (100k paths)")
for name, scn in (
    ("BSC(0.45), t=50, eta=0.3", conc.ConcentrationScenario(markov.bsc(0.45), [0.5, 0.5], 50, 0.3)),
    ("binary (1/3, 1/4), t=20", conc.ConcentrationScenario(K, pi, 20, eta)),
):
    emp = conc.empirical_tail(scn, np.array([1.0, 0.0]), trials=100_000, seed=0)
    print(f"  {name:<26} empirical {emp.frequency:.2e} [{emp.wilson_lo:.2e}, {emp.wilson_hi:.2e}]"
          f"  bound {conc.markov_mcdiarmid_bound(scn):.2e}")

print("\nburn-in for BSC(0.1), t=1000, eta=0.2: fewest discarded steps for a target tail")
for delta in (1e-3, 1e-2):
    for M in (10.0, 1000.0):
        t0 = conc.burn_in_lower_bound(delta, 1000, 0.2, 0.1, M)
        print(f"  delta={delta:g}, start density up to {M:g}: t0 >= {t0:.1f}")
