"""Mean expansions E(X_n)/n for every statistic."""
from __future__ import annotations

import mpmath

from .. import specfun
from ..model import ModelError, SplitModel, StatKind, StatisticSpec, symmetric_model
from . import series as S
from .core import DEFAULT_K, AsymptoticExpansion, build_series
from .variance import _round, digits_of, working

__all__ = ["mean_expansion"]


def _size_like(ctx, a, b):
    # G1(s) = -(s+1) Gamma(s); at s = -1 + chi this is -Gamma(1+chi)/(chi-1)
    r = len(ctx.probs)
    scale = (r - 1) * a + 1
    h = ctx.h
    dps = mpmath.mp.dps

    def coef(k):
        chi = ctx.chi(k)
        return scale * (-specfun.gamma(1 + chi, dps) / (chi - 1)) / h

    return (b - a) + scale / h, coef


def _path_const(ctx, shift):
    h = ctx.h
    return mpmath.euler / h + S._log2_sum(ctx) / (2 * h * h) + shift


def mean_expansion(statistic, model: SplitModel = None, prec=None, K: int = DEFAULT_K) -> AsymptoticExpansion:
    """E(X_n)/n (or E(X_n) itself for leader election) as an expansion in n."""
    stat = statistic if isinstance(statistic, StatisticSpec) else StatisticSpec.of(statistic)
    kind = stat.kind
    if kind is StatKind.RADIX:
        model = symmetric_model(stat.b)
    elif model is None:
        model = symmetric_model(2)
    stat.check_model(model)
    digits = digits_of(prec)

    if kind is StatKind.IPL:
        from .ipl import ipl_mean_expansion
        return ipl_mean_expansion(model, prec, K)

    with working(model, prec, K) as ctx:
        h = ctx.h
        dps = mpmath.mp.dps
        c_log = 0
        if kind is StatKind.LEADER:
            return AsymptoticExpansion(h=_round(h, digits), c_const=mpmath.mpf(0), c_n=mpmath.mpf(2),
                                       per_n=False, label="leader mean",
                                       fourier=build_series(ctx, lambda k: 0, 0, 0))
        if kind in (StatKind.SIZE, StatKind.MULTIACCESS):
            const, coef = _size_like(ctx, stat.init0, stat.init1)
        elif kind in (StatKind.EPL, StatKind.RADIX):
            const = _path_const(ctx, 0)
            c_log = 1 / h

            def coef(k):
                return -specfun.gamma(ctx.chi(k), dps) / h
        elif kind is StatKind.PATRICIA_EPL:
            const = _path_const(ctx, -1)
            c_log = 1 / h
            p, q = ctx.probs

            def coef(k):
                chi = ctx.chi(k)
                return -specfun.gamma(chi, dps) * (q * p ** (-chi) + p * q ** (-chi)) / h
        elif kind is StatKind.PERIPHERAL:
            const = 1 + 1 / h
            p, q = ctx.probs

            def coef(k):
                chi = ctx.chi(k)
                return (q * p ** (-chi) + p * q ** (-chi)) * specfun.gamma(1 + chi, dps) / h
        else:
            raise ModelError(f"no mean expansion for {kind.value}")

        const = _round(mpmath.mpf(const), digits)
        fs = build_series(ctx, lambda k: _round(coef(k), digits), const, K)
        return AsymptoticExpansion(h=_round(h, digits), c_const=const, c_log=_round(mpmath.mpf(c_log), digits),
                                   fourier=fs, label=f"{kind.value} mean", meta={"digits": digits, "K": K})
