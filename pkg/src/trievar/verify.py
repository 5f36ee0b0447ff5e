"""Cross-checks: exact against asymptotic values, analytic identities, oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np

from . import asymptotics as A
from .asymptotics.core import FourierSeries, sum_until_small
from .exact import (
    MomentTable,
    solve_internal_path_length,
    solve_leader_election,
    solve_statistic,
    to_mpf,
)
from .model import SplitModel, StatKind, StatisticSpec, symmetric_model
from .specfun import sinh_sum

__all__ = [
    "ComparisonRow",
    "ComparisonReport",
    "compare",
    "decreasing_with_one_violation",
    "check_identity",
    "identity_report",
    "IDENTITIES",
    "amplitude",
    "sinh_terms",
    "poissonized_moments",
    "fluctuation_correlation",
    "exact_table",
]

IDENTITIES = ("dyadic", "bary", "peripheral", "size_constant_equivalence", "epl_constant_equivalence",
              "size_fourier_equivalence")


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    exact: object
    predicted: object
    gap: object


@dataclass
class ComparisonReport:
    statistic: str
    model: str
    quantity: str
    rows: list = field(default_factory=list)

    @property
    def gaps(self):
        return [r.gap for r in self.rows]

    @property
    def converging(self) -> bool:
        return decreasing_with_one_violation(self.gaps)

    @property
    def max_gap(self):
        return max(self.gaps)

    def scaled_gaps(self):
        """gap * n for every row (bounded when the error is O(1/n))."""
        return [r.gap * r.n for r in self.rows]


def decreasing_with_one_violation(values: Sequence) -> bool:
    ups = sum(1 for a, b in zip(values, values[1:]) if b > a)
    return ups <= 1


def exact_table(stat: StatisticSpec, model: SplitModel, n_max: int, digits: int) -> MomentTable:
    if stat.kind is StatKind.IPL:
        return solve_internal_path_length(model, n_max, digits).as_moment_table()
    if stat.kind is StatKind.LEADER:
        return solve_leader_election(n_max, digits)
    return solve_statistic(stat, model, n_max, digits)


def compare(statistic, model: SplitModel = None, n_list: Sequence[int] = (256, 1024), prec=None,
            K: int = A.DEFAULT_K, moment: str = "variance", table: Optional[MomentTable] = None,
            expansion=None) -> ComparisonReport:
    """Exact sigma_n^2/n (or mu_n/n) against the asymptotic expansion on a ladder of n.

    For leader election the moments themselves are compared, not per key.
    """
    stat = statistic if isinstance(statistic, StatisticSpec) else StatisticSpec.of(statistic)
    if stat.kind is StatKind.RADIX:
        model = symmetric_model(stat.b)
    model = model or symmetric_model(2)
    digits = A.core.DEFAULT_DIGITS if prec is None else int(getattr(prec, "digits", prec))
    n_list = sorted(int(n) for n in n_list)
    if table is None:
        table = exact_table(stat, model, n_list[-1], digits)
    elif table.n_max < n_list[-1]:
        raise ValueError(f"table stops at n = {table.n_max}, below {n_list[-1]}")
    if expansion is None:
        if moment == "variance":
            expansion = A.variance_expansion(stat, model, digits, K)
        else:
            expansion = A.mean_expansion(stat, model, digits, K)
    name = "variance" if moment == "variance" else "mean"
    report = ComparisonReport(stat.kind.value, model.describe(),
                              f"{name}" if not expansion.per_n else f"{name}/n")
    with mpmath.workdps(digits + 10):
        for n in n_list:
            val = table.mp(name, n)
            if expansion.per_n:
                val = val / n
            pred = A.evaluate(expansion, n, digits)
            report.rows.append(ComparisonRow(n, val, pred, abs(val - pred)))
    return report


# ---------------------------------------------------------------------------
# identities


def _digits(prec):
    return 32 if prec is None else int(getattr(prec, "digits", prec))


def _alt_sum(f, eps, J=None):
    """sum_{j>=1} (-1)^j f(j)."""
    def terms():
        j = 1
        while True:
            t = f(j)
            yield -t if j % 2 else t
            j += 1
    return sum_until_small(terms(), eps, J, "identity series").real


def _pos_sum(f, eps, J=None):
    def terms():
        j = 1
        while True:
            yield f(j)
            j += 1
    return sum_until_small(terms(), eps, J, "identity series").real


def sinh_terms(prec=None) -> dict:
    """The exponentially small remainders, with the prefactors they carry in the identities."""
    d = _digits(prec)
    with mpmath.workdps(d + 10):
        L = mpmath.log(2)
        lin = sinh_sum("linear", L, d)
        cub = sinh_sum("cubic", L, d)
        return {
            "linear_sum": lin,
            "cubic_sum": cub,
            "dyadic_term": 2 * mpmath.pi ** 2 / L ** 2 * lin,
            "peripheral_term": 4 * mpmath.pi ** 2 / L ** 4 * cub,
        }


def check_identity(name: str, prec=None, b: int = 2):
    """|LHS - RHS| of an identity, each side summed on its own."""
    d = _digits(prec)
    with mpmath.workdps(d + 12):
        eps = mpmath.mpf(10) ** (-(d + 8))
        two = mpmath.mpf(2)
        if name == "dyadic":
            L = mpmath.log(2)
            lhs = _alt_sum(lambda j: j / (two ** j - 1), eps)
            rhs = mpmath.mpf(1) / 8 - 1 / (2 * L) - 2 * mpmath.pi ** 2 / L ** 2 * sinh_sum("linear", L, d + 8)
        elif name == "bary":
            if b < 2:
                raise ValueError("b-ary identity needs b >= 2")
            B = mpmath.mpf(b)
            L = mpmath.log(B)
            lhs = mpmath.mpf(1) / 2 - 1 / L + 2 * _pos_sum(lambda k: 1 / (B ** k + 1), eps)
            rhs = (mpmath.mpf(1) / 4 + 2 * _pos_sum(lambda k: 1 / (B ** k + 1) ** 2, eps)
                   + 4 * mpmath.pi ** 2 / L ** 2 * sinh_sum("linear", L, d + 8))
        elif name == "peripheral":
            L = mpmath.log(2)
            lhs = 2 * _alt_sum(lambda j: j * (j * j - 1) / (two ** j - 1), eps)
            rhs = 1 / L - mpmath.mpf(3) / 8 + 4 * mpmath.pi ** 2 / L ** 4 * sinh_sum("cubic", L, d + 8)
        elif name == "size_constant_equivalence":
            L = mpmath.log(2)
            lin = sinh_sum("linear", L, d + 8)
            a = (mpmath.mpf(1) / 4 + 2 * _alt_sum(lambda j: (j - 1) / (two ** j - 1), eps)) / L
            r = (1 / (2 * L) - 1 / L ** 2 - 2 / L * _alt_sum(lambda j: 1 / (two ** j - 1), eps)
                 - 4 * mpmath.pi ** 2 / L ** 3 * lin)
            m = ((mpmath.mpf(1) / 2 + 2 * _pos_sum(lambda j: 1 / (two ** j + 1), eps)) / L - 1 / L ** 2
                 - 4 * mpmath.pi ** 2 / L ** 3 * lin)
            return max(abs(a - r), abs(a - m), abs(r - m))
        elif name == "epl_constant_equivalence":
            L = mpmath.log(2)
            lhs = (mpmath.mpf(1) / 4 + L + 2 * _alt_sum(lambda j: (j * j - j - 1) / (j * (two ** j - 1)), eps)) / L
            rhs = (1 + 1 / (2 * L) - 1 / L ** 2 - 2 / L * _alt_sum(lambda j: (j + 1) / (j * (two ** j - 1)), eps)
                   - 4 * mpmath.pi ** 2 / L ** 3 * sinh_sum("linear", L, d + 8))
        elif name == "size_fourier_equivalence":
            # the symmetric closed form of G(-1+chi_k) against the general-p formula, k = 1..3
            model = symmetric_model(2)
            from .asymptotics import series as S
            from .asymptotics.core import SeriesContext
            ctx = SeriesContext(model, d, 3)
            return max(abs(S.size_kernel_symmetric(ctx, ctx.chi(k)) - S.size_kernel_general(ctx, ctx.chi(k), k=k))
                       for k in range(0, 4))
        else:
            raise ValueError(f"unknown identity {name!r}; choose from {', '.join(IDENTITIES)}")
        return abs(lhs - rhs)


def identity_report(prec=None, bases=(2, 3, 5, 10)) -> list:
    """[(label, residual)] for every identity check."""
    out = [("dyadic", check_identity("dyadic", prec))]
    out += [(f"bary({b})", check_identity("bary", prec, b=b)) for b in bases]
    for name in ("peripheral", "size_constant_equivalence", "epl_constant_equivalence", "size_fourier_equivalence"):
        out.append((name, check_identity(name, prec)))
    return out


def amplitude(series: Optional[FourierSeries]):
    """(sum_{k != 0} |c_k|, estimated tail beyond K)."""
    if series is None or not series.coeffs:
        return mpmath.mpf(0), mpmath.mpf(0)
    return series.amplitude(), series.tail


# ---------------------------------------------------------------------------
# Poisson-side oracle


def poissonized_moments(table: MomentTable, z, digits: int = 32):
    """(f1(z), V(z)) with f1 the Poisson transform of the means and
    V = f2 - f1^2 - z f1'^2 built from the exact moments.

    Needs table.n_max comfortably above z (z + 20 sqrt(z) + 40 is checked).
    """
    z = float(z)
    need = z + 20 * math.sqrt(z) + 40
    if table.n_max < need:
        raise ValueError(f"table up to {table.n_max} too short for z = {z}; need about {int(need)}")
    N = table.n_max
    with mpmath.workdps(digits + 15):
        zz = mpmath.mpf(z)
        w = mpmath.exp(-zz)
        f1 = f2 = d1 = mpmath.mpf(0)
        prev = table.mp("mean", 0)
        for n in range(N):
            mu = prev
            nxt = table.mp("mean", n + 1)
            f1 += w * mu
            f2 += w * table.mp("second", n)
            d1 += w * (nxt - mu)
            prev = nxt
            w = w * zz / (n + 1)
        return +f1, +(f2 - f1 ** 2 - zz * d1 ** 2)


def fluctuation_correlation(table: MomentTable, expansion, points: Sequence, digits: int = 32,
                            use_poisson: bool = True):
    """Pearson correlation of the detrended values with the expansion's oscillating part.

    With ``use_poisson`` the detrended value is V(z)/z - c_const from the
    Poisson side; otherwise sigma_n^2/n - c_const at integer n.
    """
    det, osc = [], []
    for x in points:
        if use_poisson:
            _, v = poissonized_moments(table, x, digits)
            val = v / x
        else:
            x = int(x)
            val = table.mp("variance", x) / x
        with mpmath.workdps(digits + 10):
            det.append(float(val - A.evaluate(expansion, x, digits) + A.evaluate_fluctuation(expansion, x).real))
            osc.append(float(A.evaluate_fluctuation(expansion, x).real))
    det = np.array(det) - np.mean(det)
    osc = np.array(osc) - np.mean(osc)
    return float(np.dot(det, osc) / math.sqrt(np.dot(det, det) * np.dot(osc, osc)))
