from fractions import Fraction

import numpy as np
import pytest

from oracles import trie_moments
from trievar.exact import solve_internal_path_length, solve_statistic
from trievar.model import ModelError, StatisticSpec, make_model, symmetric_model
from trievar.montecarlo import SimResult, sample, simulate

TRIALS = 20000


def exact_moments(kind, n):
    m1, m2 = trie_moments(kind, n)[n]
    return float(m1), float(m2 - m1 * m1)


@pytest.mark.parametrize("kind", ["size", "epl", "peripheral", "patricia", "leader"])
def test_small_n_against_rational_oracle(kind):
    stat = "patricia-epl" if kind == "patricia" else kind
    n = 12
    mu, var = exact_moments(kind, n)
    r = simulate(stat, symmetric_model(2), n, TRIALS, seed=11)
    assert abs(r.z_mean(mu)) < 4
    assert abs(r.z_var(var)) < 5


def test_ipl_small_n():
    t = solve_internal_path_length(symmetric_model(2), 12, 20)
    r = simulate("ipl", symmetric_model(2), 12, TRIALS, seed=5)
    assert abs(r.z_mean(float(t.mp("mean_X", 12)))) < 4
    assert abs(r.z_var(float(t.mp("var_X", 12)))) < 5


def test_asymmetric_and_multiway():
    m = make_model([0.3, 0.7])
    t = solve_statistic(StatisticSpec.of("size"), m, 40, 20)
    r = simulate("size", m, 40, TRIALS, seed=3)
    assert abs(r.z_mean(float(t.mp("mean", 40)))) < 4
    m3 = symmetric_model(3)
    t3 = solve_statistic(StatisticSpec.of("multiaccess"), m3, 40, 20)
    r3 = simulate("multiaccess", m3, 40, TRIALS, seed=3)
    assert abs(r3.z_var(float(t3.mp("variance", 40)))) < 5


def test_patricia_size_is_deterministic():
    # a PATRICIA trie on n keys has exactly n - 1 internal nodes, so its EPL at n = 2 is 2
    x = sample("patricia-epl", symmetric_model(2), 2, 100, seed=1)
    assert np.all(x == 2)


def test_trivial_n():
    assert np.all(sample("size", symmetric_model(2), 1, 10, seed=0) == 0)
    assert np.all(sample("peripheral", symmetric_model(2), 1, 10, seed=0) == 1)
    stat = StatisticSpec.of("size", init0=1.0, init1=1.0)
    assert np.all(sample(stat, symmetric_model(2), 0, 10, seed=0) == 1)


def test_nonzero_initial_values_count_empty_leaves():
    # with X_0 = X_1 = 1 the size counts every node, internal or external: 2N + 1 for two-way tries
    stat = StatisticSpec.of("size", init0=1.0, init1=1.0)
    a = sample(stat, symmetric_model(2), 30, 500, seed=9)
    b = sample("size", symmetric_model(2), 30, 500, seed=9)
    assert np.array_equal(a, 2 * b + 1)


def test_same_seed_same_result():
    a = simulate("epl", symmetric_model(2), 100, 5000, seed=42)
    b = simulate("epl", symmetric_model(2), 100, 5000, seed=42)
    assert a == b
    c = simulate("epl", symmetric_model(2), 100, 5000, seed=43)
    assert c != a


def test_batches_are_independent_of_trial_count():
    # the first batch depends only on the seed
    a = sample("size", symmetric_model(2), 64, 2000, seed=7)
    b = sample("size", symmetric_model(2), 64, 4000, seed=7)
    assert np.array_equal(a, b[:2000])


def test_result_fields():
    r = simulate("size", symmetric_model(2), 50, 1000, seed=1)
    assert isinstance(r, SimResult)
    assert r.trials == 1000 and r.n == 50 and r.seed == 1
    assert r.se_mean > 0 and r.se_var > 0


def test_argument_checks():
    with pytest.raises(ValueError):
        simulate("size", symmetric_model(2), 10, 1, seed=0)
    with pytest.raises(ModelError):
        simulate("leader", make_model([0.3, 0.7]), 10, 100, seed=0)
    with pytest.raises(ValueError):
        sample("size", symmetric_model(2), -1, 10, seed=0)


def test_fraction_oracle_consistency():
    # the oracle itself: size at n = 2 is 1 + Geom(1/2) unary levels
    m1, m2 = trie_moments("size", 2, Fraction(1, 2))[2]
    assert (m1, m2 - m1 * m1) == (2, 2)
