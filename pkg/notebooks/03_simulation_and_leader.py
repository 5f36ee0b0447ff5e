"""
Simulation against exact moments, and leader election
=====================================================

The simulator never builds strings: a trie is determined in law by the
recursive binomial splits of the key counts.  Here it is checked against
the exact recurrences, and then used on the coin-flipping leader election
protocol whose cost has mean exactly 2n.
"""

# %%
import mpmath
import numpy as np

from trievar import StatisticSpec, symmetric_model
from trievar import asymptotics as A
from trievar.exact import solve_leader_election
from trievar.montecarlo import sample, simulate
from trievar.verify import exact_table

n, trials, seed = 256, 20000, 2024
for kind in ("size", "epl", "ipl", "peripheral", "patricia-epl", "leader"):
    stat = StatisticSpec.of(kind)
    tab = exact_table(stat, symmetric_model(2), n, 20)
    r = simulate(stat, symmetric_model(2), n, trials, seed)
    mu, var = float(tab.mp("mean", n)), float(tab.mp("variance", n))
    print(f"{kind:>13} mean {r.mean_hat:10.2f} ({r.z_mean(mu):+.2f} se)  var {r.var_hat:10.1f} ({r.z_var(var):+.2f} se)")

# %%
# the same seed gives the same numbers
a = sample("size", symmetric_model(2), 100, 1000, seed=1)
b = sample("size", symmetric_model(2), 100, 1000, seed=1)
print("identical:", np.array_equal(a, b))

# %%
# leader election: exact mean 2n, variance 2n + pi^2/(2 log 2) + tiny oscillation
tab = solve_leader_election(1024, 32)
e = A.leader_variance_expansion(32, K=10)
with mpmath.workdps(40):
    for n in (16, 64, 256, 1024):
        print(n, "mean - 2n", mpmath.nstr(tab.mp("mean", n) - 2 * n, 3),
              "variance - 2n", mpmath.nstr(tab.mp("variance", n) - 2 * n, 12),
              "predicted", mpmath.nstr(A.evaluate(e, n) - 2 * n, 12))
print("pi^2/(2 log 2) =", mpmath.nstr(mpmath.pi ** 2 / (2 * mpmath.log(2)), 12))

# %%
# a histogram of simulated costs at n = 64
x = sample("leader", symmetric_model(2), 64, 50000, seed=7)
counts, edges = np.histogram(x, bins=12)
for c, lo in zip(counts, edges):
    print(f"{lo:7.1f} {'#' * int(60 * c / counts.max())}")
