"""
Size of a random trie: variance and its tiny oscillation
=========================================================

For n keys in a binary trie the variance of the number of internal nodes
grows like n times a constant plus a periodic function of log2 n whose
amplitude is below 2e-6.  We compute the exact variance for n up to 2048,
subtract the constant, and compare what is left with the Fourier series.
"""

# %%
import mpmath
import numpy as np

from trievar import asymptotics as A
from trievar import golden_model, symmetric_model
from trievar.exact import solve_statistic
from trievar.model import StatisticSpec

model = symmetric_model(2)
stat = StatisticSpec.of("size")
expansion = A.size_variance_series(model, 32, K=10)
print("constant  ", mpmath.nstr(expansion.c_const, 20))
print("amplitude ", mpmath.nstr(expansion.fourier.amplitude(), 6))

# %%
# the first few Fourier coefficients decay like |Gamma(1 + 2 pi i k / log 2)|
for k, c in expansion.coefficient_rows()[10:14]:
    print(k, mpmath.nstr(c, 8))

# %%
# exact moments from the splitting recurrence, 32 significant digits
table = solve_statistic(stat, model, 2048, 32)
ns = np.unique(np.geomspace(256, 2048, 25).astype(int))
rows = []
with mpmath.workdps(40):
    for n in ns:
        detrended = table.mp("variance", n) / n - expansion.c_const
        rows.append((n, float(detrended), float(A.evaluate_fluctuation(expansion, n).real)))
print(f"{'n':>6} {'exact - const':>14} {'fluctuation':>14}")
for n, d, f in rows:
    print(f"{n:>6} {d:14.3e} {f:14.3e}")

# %%
# the detrended exact values follow the fluctuation up to an O(1/n) drift
d = np.array([r[1] for r in rows])
f = np.array([r[2] for r in rows])
print("correlation", np.corrcoef(d, f)[0, 1])

# %%
# the golden-ratio model q = p^2 also oscillates, but far more weakly
golden = A.size_variance_series(golden_model(), 32, K=10)
print("golden constant ", mpmath.nstr(golden.c_const, 16))
print("golden amplitude", mpmath.nstr(golden.fourier.amplitude(), 4))

# %%
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    x = np.log2(ns)
    plt.plot(x, d, "o", label="exact variance/n - constant")
    plt.plot(x, f, "-", label="Fourier series, K = 10")
    plt.xlabel("log2 n")
    plt.legend()
    plt.savefig("size_fluctuation.png", dpi=120)
    print("wrote size_fluctuation.png")
