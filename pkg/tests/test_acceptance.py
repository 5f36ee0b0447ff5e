"""Acceptance checks, one or more tests per criterion.

Run with pytest (a PASS/FAIL line per criterion is printed at the end of the
session) or directly as a script.
"""
import subprocess
import sys
import time

import mpmath
import numpy as np
import pytest

from trievar import asymptotics as A
from trievar import specfun
from trievar.exact import solve_internal_path_length, solve_leader_election
from trievar.model import StatisticSpec, golden_model, make_model, symmetric_model
from trievar.montecarlo import simulate
from trievar.serialize import to_json
from trievar.verify import compare, exact_table, identity_report, sinh_terms

D = 32
TOL26 = mpmath.mpf(10) ** -26

RADIX_TABLE = {
    2: "4.35290669894540060374",
    3: "1.80839118999278196720",
    4: "1.18266255423984825415",
    5: "0.91013813774917045524",
    6: "0.75883877609090635697",
    7: "0.66265993661111750882",
    8: "0.59600352646003323615",
    9: "0.54696009129353034188",
    10: "0.50926083872624761651",
}


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def gap(a, b):
    return abs(mpmath.mpf(a) - mpmath.mpf(b))


@criterion(1, "size variance constant, p = 1/2")
def test_size_constant_symmetric(note):
    t = time.perf_counter()
    e = A.size_variance_series(symmetric_model(2), D)
    dt = time.perf_counter() - t
    g = gap(e.c_const, "0.845858623076001")
    note(f"c = {mpmath.nstr(e.c_const, 16)}, gap {mpmath.nstr(g, 3)}, {dt:.2f} s")
    assert g < 1e-12
    assert dt < 1.0


@criterion(2, "size variance constant, golden ratio q = p^2")
def test_size_constant_golden(note):
    t = time.perf_counter()
    e = A.size_variance_series(golden_model(), D)
    dt = time.perf_counter() - t
    g = gap(e.c_const, "1.008345264470994")
    note(f"c = {mpmath.nstr(e.c_const, 16)}, gap {mpmath.nstr(g, 3)}, {dt:.2f} s")
    assert g < 1e-9
    assert dt < 5.0


@criterion(3, "oscillation amplitudes, K = 10")
def test_amplitudes(note):
    a = A.size_variance_series(symmetric_model(2), D, K=10).fourier.amplitude()
    b = A.size_variance_series(golden_model(), D, K=10).fourier.amplitude()
    note(f"p = 1/2: {mpmath.nstr(a, 4)}, golden: {mpmath.nstr(b, 4)}")
    assert a <= 1.7e-6
    assert b <= 7.3e-8


@criterion(4, "EPL variance constant, p = 1/2")
def test_epl_constant(note):
    e = A.epl_variance_series(symmetric_model(2), D)
    g = gap(e.c_const, "4.352906698945400")
    note(f"gap {mpmath.nstr(g, 3)}")
    assert g < 1e-12


@criterion(5, "radix sort table, b = 2..10")
def test_radix_table(note):
    worst = max(gap(A.radix_variance_constant(b, D), v) for b, v in RADIX_TABLE.items())
    note(f"worst gap {mpmath.nstr(worst, 3)}")
    assert worst < 1e-10


@criterion(6, "peripheral and PATRICIA constants")
def test_peripheral_and_patricia(note):
    g_per = gap(A.peripheral_variance_series(D, K=0).meta["G(-1)"], "0.557304953249505")
    g_pat = gap(A.patricia_epl_series(symmetric_model(2), D, K=0).c_const, "0.361326059781678")
    note(f"peripheral gap {mpmath.nstr(g_per, 3)}, PATRICIA gap {mpmath.nstr(g_pat, 3)}")
    assert g_per < 1e-12
    assert g_pat < 1e-12


@criterion(7, "identities and exponentially small sums")
def test_identities(note):
    rows = identity_report(D, bases=(2, 3, 5, 10))
    worst = max(r for _, r in rows)
    s = sinh_terms(D)
    note(f"worst residual {mpmath.nstr(worst, 3)}, linear {mpmath.nstr(s['dyadic_term'], 3)}, "
         f"cubic {mpmath.nstr(s['peripheral_term'], 3)}")
    assert worst < TOL26
    assert s["dyadic_term"] < 1.1e-10 and s["linear_sum"] < 1.1e-10
    assert s["peripheral_term"] < 6e-9 and s["cubic_sum"] < 6e-9


@pytest.mark.slow
@criterion(8, "exact against asymptotic variance, n = 2^8..2^13")
def test_convergence(note):
    t = time.perf_counter()
    ladder = [2 ** 8, 2 ** 10, 2 ** 12, 2 ** 13]
    results = {}
    for kind in ("size", "epl"):
        for p in (0.5, 0.3):
            model = symmetric_model(2) if p == 0.5 else make_model([p, 1 - p])
            rep = compare(kind, model, ladder, D)
            results[(kind, p)] = rep
            note(f"{kind} p={p}: last gap {mpmath.nstr(rep.gaps[-1], 3)}")
    dt = time.perf_counter() - t
    note(f"{dt:.0f} s")
    for rep in results.values():
        assert rep.converging
        assert rep.gaps[-1] < 1e-2
    assert dt < 600


@pytest.mark.slow
@criterion(9, "leader election mean and variance")
def test_leader(note):
    tab = solve_leader_election(4096, D)
    e = A.leader_variance_expansion(D, K=10)
    with mpmath.workdps(D + 10):
        worst = max(abs(tab.mp("mean", n) - 2 * n) / n for n in range(2, 4097))
        scaled = [(tab.mp("variance", 2 ** j) - A.evaluate(e, 2 ** j, D)) * 2 ** j for j in range(6, 13)]
    note(f"mean error {mpmath.nstr(worst, 3)}/n, n*residual {mpmath.nstr(scaled[0], 3)} .. {mpmath.nstr(scaled[-1], 3)}")
    assert worst < TOL26
    # bounded: the scaled residual settles instead of growing
    assert max(abs(x) for x in scaled) <= 2 * abs(scaled[0])
    assert abs(scaled[-1] - scaled[-2]) < abs(scaled[1] - scaled[0])


@pytest.fixture(scope="module")
def ipl_8192():
    t = solve_internal_path_length(symmetric_model(2), 2 ** 13, D)
    e = A.ipl_expansion(D, K=10)
    n = 2 ** 13
    with mpmath.workdps(D + 10):
        exact = t.mp("var_X", n) / n
        L = mpmath.log(2)
        f02 = e.c_log2 + e.fourier_log2.oscillation(e.fourier_log2.phase(n)).real
        one = f02 * mpmath.log(n) ** 2 / L ** 2
        three = A.evaluate(e, n, D)
        return abs(one / exact - 1), abs(three / exact - 1)


@pytest.mark.slow
@criterion(10, "internal path length variance at n = 2^13")
def test_ipl_three_terms(ipl_8192, note):
    one, three = ipl_8192
    note(f"three-term relative gap {mpmath.nstr(three, 3)}")
    assert three < one
    assert three < 0.02


@pytest.mark.slow
@criterion(10, "internal path length variance at n = 2^13")
@pytest.mark.xfail(strict=True, reason="leading term alone is 33% below the exact value at n = 2^13")
def test_ipl_leading_term(ipl_8192, note):
    one, _ = ipl_8192
    note(f"leading-term relative gap {mpmath.nstr(one, 3)}")
    assert one < 0.15


MC_CASES = [
    ("size", None), ("epl", None), ("ipl", None), ("peripheral", None), ("patricia-epl", None),
    ("leader", None), ("multiaccess", 3), ("radix", 4),
]


@pytest.mark.slow
@criterion(11, "Monte Carlo against exact moments, 10^5 trials")
@pytest.mark.parametrize("kind,b", MC_CASES)
def test_monte_carlo(kind, b, note):
    stat = StatisticSpec.of(kind, b=b) if kind == "radix" else StatisticSpec.of(kind)
    model = symmetric_model(b or 2)
    tab = exact_table(stat, model, 1024, 20)
    zs = []
    for n in (16, 256, 1024):
        r = simulate(stat, model, n, 10 ** 5, seed=0xC0FFEE + n)
        zs.append((n, r.z_mean(float(tab.mp("mean", n))), r.z_var(float(tab.mp("variance", n)))))
    note(f"{kind}: max |z| mean {max(abs(z[1]) for z in zs):.2f}, var {max(abs(z[2]) for z in zs):.2f}")
    for n, zm, zv in zs:
        assert abs(zm) < 4, (n, zm)
        assert abs(zv) < 5, (n, zv)


@criterion(12, "special functions")
def test_specfun(note):
    tol = mpmath.mpf(10) ** -(D - 6)
    rng = np.random.default_rng(2024)
    pts = rng.uniform(-8, 8, size=(100, 2))
    worst = mpmath.mpf(0)
    with mpmath.workdps(D + 10):
        for x, y in pts:
            z = mpmath.mpc(x, y)
            g = specfun.gamma(z, D)
            rec = abs(specfun.gamma(z + 1, D) - z * g) / abs(z * g)
            refl = abs(g * specfun.gamma(1 - z, D) * mpmath.sin(mpmath.pi * z) - mpmath.pi) / mpmath.pi
            worst = max(worst, rec, refl)
        z2 = abs(specfun.zeta(2, D) - mpmath.pi ** 2 / 6)
        psi = abs(specfun.digamma(1, D) + mpmath.euler)
    note(f"gamma worst {mpmath.nstr(worst, 3)}, zeta(2) {mpmath.nstr(z2, 3)}, psi(1) {mpmath.nstr(psi, 3)}")
    assert worst < tol and z2 < tol and psi < tol


CLI_RUNS = [
    ["exact", "--stat", "size", "--n-max", "40"],
    ["exact", "--stat", "ipl", "--n-max", "30", "--format", "json"],
    ["simulate", "--stat", "epl", "--n", "200", "--trials", "4000"],
    ["simulate", "--stat", "multiaccess", "--b", "3", "--n", "100", "--trials", "3000", "--format", "json"],
    ["asympt", "--stat", "size", "--p", "(sqrt(5)-1)/2"],
    ["asympt", "--stat", "ipl", "--level", "log", "--format", "json"],
    ["compare", "--stat", "epl", "--p", "0.3", "--n", "64,128"],
    ["plot-data", "--stat", "size", "--n-max", "128", "--points", "10"],
    ["identities"],
    ["table"],
]


@criterion(13, "deterministic simulation and CLI output")
def test_determinism(note):
    a = to_json(simulate("ipl", symmetric_model(2), 300, 5000, seed=99))
    b = to_json(simulate("ipl", symmetric_model(2), 300, 5000, seed=99))
    assert a == b
    for argv in CLI_RUNS:
        outs = [subprocess.run([sys.executable, "-m", "trievar.cli", *argv], capture_output=True, check=True).stdout
                for _ in range(2)]
        assert outs[0] == outs[1], argv
        assert outs[0]
    note(f"simulate and {len(CLI_RUNS)} CLI invocations identical")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
