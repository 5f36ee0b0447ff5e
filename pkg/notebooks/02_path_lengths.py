"""
Path lengths: external, internal, peripheral and PATRICIA
=========================================================

The external path length variance per key tends to a constant (plus
oscillation) when p = 1/2 but picks up a log n term when p != 1/2.  The
internal path length variance grows like n (log n)^2, and at practical
sizes the lower-order terms carry a third of its value.
"""

# %%
import mpmath

from trievar import asymptotics as A
from trievar import make_model, symmetric_model
from trievar.exact import solve_internal_path_length
from trievar.verify import compare

half = symmetric_model(2)
skew = make_model([0.3, 0.7])

for name, model in (("p = 1/2", half), ("p = 0.3", skew)):
    e = A.epl_variance_series(model, 32)
    print(name, "c_log", mpmath.nstr(e.c_log, 10), "c_const", mpmath.nstr(e.c_const, 10))

# %%
# exact against predicted variance per key; the gap shrinks like 1/n
for name, model in (("p = 1/2", half), ("p = 0.3", skew)):
    rep = compare("epl", model, [128, 256, 512, 1024], 32)
    print(name, [mpmath.nstr(g, 3) for g in rep.gaps])

# %%
# internal path length: leading term alone versus all three terms
v = A.ipl_expansion(32, K=10)
print("c_log2", mpmath.nstr(v.c_log2, 12), "c_log", mpmath.nstr(v.c_log, 12), "c_const", mpmath.nstr(v.c_const, 12))
table = solve_internal_path_length(half, 1024, 32)
with mpmath.workdps(40):
    L = mpmath.log(2)
    for n in (64, 256, 1024):
        exact = table.mp("var_X", n) / n
        lead = (v.c_log2 + v.fourier_log2.oscillation(v.fourier_log2.phase(n)).real) * mpmath.log(n) ** 2 / L ** 2
        full = A.evaluate(v, n)
        print(n, "exact", mpmath.nstr(exact, 10), "leading", mpmath.nstr(lead / exact, 4),
              "three terms", mpmath.nstr(full / exact, 10))

# %%
# peripheral path length and PATRICIA tries at p = 1/2
per = A.peripheral_variance_series(32, K=4)
pat = A.patricia_epl_series(half, 32, K=4)
print("peripheral G(-1)      ", mpmath.nstr(per.meta["G(-1)"], 15))
print("peripheral per key    ", mpmath.nstr(per.c_const, 15))
print("PATRICIA EPL per key  ", mpmath.nstr(pat.c_const, 15))

# %%
# radix sort with b buckets: more buckets, smaller variance
for b in range(2, 11):
    print(b, mpmath.nstr(A.radix_variance_constant(b, 32), 20))
