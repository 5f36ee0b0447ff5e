from fractions import Fraction

import mpmath
import numpy as np
import pytest

from oracles import ipl_moments, trie_moments
from trievar.exact import (
    WorkBudgetExceeded,
    hadamard_product,
    solve_internal_path_length,
    solve_leader_election,
    solve_statistic,
)
from trievar.model import StatisticSpec, make_model, symmetric_model

N = 24
D = 32
TOL = mpmath.mpf(10) ** -26


def frac_mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def check_table(table, oracle, scale_tol=TOL):
    with mpmath.workdps(D + 10):
        for n, (m1, m2) in enumerate(oracle):
            mu = frac_mp(m1)
            var = frac_mp(m2) - mu * mu
            assert abs(table.mp("mean", n) - mu) <= scale_tol * (1 + abs(mu)), n
            assert abs(table.mp("variance", n) - var) <= scale_tol * (1 + abs(frac_mp(m2))), n


@pytest.mark.parametrize("kind", ["size", "epl", "peripheral", "patricia-epl"])
@pytest.mark.parametrize("p", [Fraction(1, 2), Fraction(1, 3)])
def test_two_way_against_rational_oracle(kind, p):
    model = symmetric_model(2) if p == Fraction(1, 2) else make_model([1 / 3, 2 / 3], exact_probs=["1/3", "2/3"])
    table = solve_statistic(StatisticSpec.of(kind), model, N, D)
    oracle_kind = "patricia" if kind == "patricia-epl" else kind
    check_table(table, trie_moments(oracle_kind, N, p))


def test_size_with_initial_values():
    stat = StatisticSpec.of("size", init0=1.0, init1=1.0)
    table = solve_statistic(stat, symmetric_model(2), N, D)
    check_table(table, trie_moments("size", N, Fraction(1, 2), init0=1, init1=1))


def test_leader_against_rational_oracle():
    check_table(solve_leader_election(N, D), trie_moments("leader", N))


def test_leader_mean_is_2n():
    t = solve_leader_election(256, D)
    for n in range(2, 257):
        assert abs(t.mp("mean", n) - 2 * n) < TOL * n


def test_ipl_against_rational_oracle():
    t = solve_internal_path_length(symmetric_model(2), N, D)
    names = ("mean_N", "second_N", "mean_X", "second_X", "cross_NX")
    with mpmath.workdps(D + 10):
        for n, row in enumerate(ipl_moments(N)):
            for name, want in zip(names, row):
                want = frac_mp(want)
                assert abs(t.mp(name, n) - want) <= TOL * (1 + abs(want)), (name, n)


def test_ipl_small_values():
    t = solve_internal_path_length(symmetric_model(2), 3, D)
    assert t.mp("mean_X", 2) == 2
    assert t.mp("var_X", 2) == 22
    assert abs(t.mp("mean_X", 3) - mpmath.mpf(46) / 9) < TOL


def test_radix_two_matches_epl():
    # radix sort with two buckets is the binary trie external path length
    a = solve_statistic(StatisticSpec.of("radix", b=2), symmetric_model(2), N, D)
    b = solve_statistic(StatisticSpec.of("epl"), symmetric_model(2), N, D)
    for n in range(N + 1):
        assert abs(a.mp("variance", n) - b.mp("variance", n)) < TOL * (1 + abs(b.mp("variance", n)))


def test_multiway_two_branches_matches_two_way():
    m = make_model([0.3, 0.7])
    a = solve_statistic(StatisticSpec.of("multiaccess"), m, N, D)
    b = solve_statistic(StatisticSpec.of("size"), m, N, D)
    for n in range(N + 1):
        assert abs(a.mp("variance", n) - b.mp("variance", n)) < 1e-24 * (1 + abs(b.mp("variance", n)))


def test_ternary_size_small_n():
    # n = 2 in a symmetric 3-way trie: same bucket w.p. 1/3, so size is 1 + Geom
    t = solve_statistic(StatisticSpec.of("multiaccess"), symmetric_model(3), 4, D)
    assert abs(t.mp("mean", 2) - mpmath.mpf(3) / 2) < TOL
    assert abs(t.mp("variance", 2) - mpmath.mpf(3) / 4) < TOL


def test_float_fast_path_agrees():
    hi = solve_statistic(StatisticSpec.of("epl"), symmetric_model(2), 200, D)
    lo = solve_statistic(StatisticSpec.of("epl"), symmetric_model(2), 200, 15)
    assert lo.variance.dtype == np.float64
    for n in (10, 100, 200):
        assert float(lo.variance[n]) == pytest.approx(float(hi.mp("variance", n)), rel=1e-9)


def test_work_budget():
    with pytest.raises(WorkBudgetExceeded):
        solve_statistic(StatisticSpec.of("multiaccess"), symmetric_model(5), 400, D, work_budget=1000)


def test_bad_arguments():
    with pytest.raises(ValueError):
        solve_statistic(StatisticSpec.of("size"), symmetric_model(2), -1, D)


def test_hadamard_product_of_identity_sequences():
    # a_n = b_n = n: e^{-z} sum n^2 z^n/n! = z^2 + z
    z = 7.5
    v = hadamard_product(lambda n: n, lambda n: n, z, 200, D)
    assert abs(v - (mpmath.mpf(z) ** 2 + z)) < 1e-25
