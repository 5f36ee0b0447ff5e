import mpmath
import pytest

from trievar import asymptotics as A
from trievar.exact import solve_statistic
from trievar.model import StatisticSpec, make_model, symmetric_model
from trievar.montecarlo import simulate
from trievar.serialize import from_json, to_json
from trievar.verify import (
    IDENTITIES,
    amplitude,
    check_identity,
    compare,
    decreasing_with_one_violation,
    exact_table,
    fluctuation_correlation,
    identity_report,
    poissonized_moments,
    sinh_terms,
)

D = 32


def test_decreasing_with_one_violation():
    assert decreasing_with_one_violation([4, 3, 2, 1])
    assert decreasing_with_one_violation([4, 5, 2, 1])
    assert not decreasing_with_one_violation([4, 5, 2, 3])


def test_compare_size_small_ladder():
    rep = compare("size", symmetric_model(2), [64, 128, 256], D)
    assert rep.quantity == "variance/n"
    assert rep.converging
    assert rep.max_gap < 1e-4
    assert [r.n for r in rep.rows] == [64, 128, 256]


def test_compare_mean_leader_not_per_key():
    rep = compare("leader", symmetric_model(2), [64, 128], D, moment="mean")
    assert rep.quantity == "mean"
    assert max(rep.gaps) < 1e-25


def test_compare_reuses_table():
    tab = exact_table(StatisticSpec.of("size"), symmetric_model(2), 128, D)
    a = compare("size", symmetric_model(2), [64, 128], D, table=tab)
    b = compare("size", symmetric_model(2), [64, 128], D)
    assert a.gaps == b.gaps
    with pytest.raises(ValueError):
        compare("size", symmetric_model(2), [64, 256], D, table=tab)


@pytest.mark.parametrize("name", [n for n in IDENTITIES if n != "bary"])
def test_identities(name):
    assert check_identity(name, D) < mpmath.mpf(10) ** -26


@pytest.mark.parametrize("b", [2, 3, 4, 5, 10, 16])
def test_bary_identity(b):
    assert check_identity("bary", D, b=b) < mpmath.mpf(10) ** -26


def test_identity_residual_scales_with_precision():
    assert check_identity("dyadic", 50) < mpmath.mpf(10) ** -44


def test_unknown_identity():
    with pytest.raises(ValueError):
        check_identity("pythagoras", D)


def test_identity_report_labels():
    labels = [lab for lab, _ in identity_report(D, bases=(2, 3))]
    assert labels[:3] == ["dyadic", "bary(2)", "bary(3)"]


def test_sinh_terms_first_term():
    t = sinh_terms(D)
    with mpmath.workdps(D + 10):
        L = mpmath.log(2)
        first = 1 / mpmath.sinh(2 * mpmath.pi ** 2 / L)
        assert abs(t["linear_sum"] - first) < 1e-20
        assert t["dyadic_term"] < 1.1e-10
        assert t["peripheral_term"] < 6e-9


def test_amplitude_empty():
    e = A.size_variance_series(make_model([0.3, 0.7]), D)
    assert amplitude(e.fourier) == (0, 0)
    s, tail = amplitude(A.size_variance_series(symmetric_model(2), D, K=6).fourier)
    assert 0 < tail < s


def test_poissonized_mean_of_leader_election():
    # mu_n = 2n for n >= 2 and 0 below, so f1(z) = 2z (1 - e^{-z})
    tab = solve_statistic(StatisticSpec.of("leader"), symmetric_model(2), 200, D)
    f1, _ = poissonized_moments(tab, 5, D)
    with mpmath.workdps(D + 10):
        assert abs(f1 - 10 * (1 - mpmath.exp(-5))) < 1e-25
    with pytest.raises(ValueError):
        poissonized_moments(tab, 190, D)


def test_fluctuation_correlation_both_routes():
    tab = exact_table(StatisticSpec.of("size"), symmetric_model(2), 1400, D)
    e = A.size_variance_series(symmetric_model(2), D)
    pts = [256 * 2 ** (i / 12) for i in range(13)]
    r_poisson = fluctuation_correlation(tab, e, pts, D, use_poisson=True)
    r_raw = fluctuation_correlation(tab, e, [int(round(x)) for x in pts], D, use_poisson=False)
    assert r_poisson > 0.999
    assert r_raw > 0.9


def test_serialize_round_trips():
    tab = solve_statistic(StatisticSpec.of("size"), symmetric_model(2), 20, D)
    for obj in (tab,
                solve_statistic(StatisticSpec.of("size"), symmetric_model(2), 20, 15),
                simulate("size", symmetric_model(2), 20, 500, 3),
                A.ipl_expansion(D, K=2),
                compare("size", symmetric_model(2), [8, 16], D, table=tab)):
        text = to_json(obj, D)
        assert to_json(from_json(text), D) == text


def test_serialize_rejects_unknown():
    with pytest.raises(TypeError):
        to_json(object())
    with pytest.raises(ValueError):
        from_json('{"type": "Nope"}')
