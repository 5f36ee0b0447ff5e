"""Variance expansions V(X_n)/n = c log n + c' + periodic part, per statistic."""
from __future__ import annotations

from contextlib import contextmanager

import mpmath

from .. import specfun
from ..model import ModelError, SplitModel, symmetric_model
from . import series as S
from .core import (
    DEFAULT_DIGITS,
    DEFAULT_K,
    AsymptoticExpansion,
    FourierSeries,
    SeriesContext,
    build_series,
    guard_digits,
    sum_until_small,
)

__all__ = [
    "size_variance_series",
    "epl_variance_series",
    "radix_variance_constant",
    "radix_variance_series",
    "peripheral_variance_constant",
    "peripheral_variance_series",
    "leader_variance_expansion",
    "multiaccess_variance_series",
    "patricia_epl_series",
    "patricia_variance_constant_alt",
    "peripheral_variance_constant_alt",
]


def digits_of(prec) -> int:
    if prec is None:
        return DEFAULT_DIGITS
    return int(getattr(prec, "digits", prec))


@contextmanager
def working(model: SplitModel, prec, K: int):
    """Context at the working precision needed for K Fourier modes."""
    digits = digits_of(prec)
    with mpmath.workdps(digits + 10):
        omega = SeriesContext(model, digits).omega
    with mpmath.workdps(digits + guard_digits(omega, K)):
        yield SeriesContext(model, digits, K)


def _round(x, digits):
    with mpmath.workdps(digits + 5):
        return +x


def _finish(ctx, const, coef, K, label, c_log=0, meta=None):
    digits = ctx.digits
    const = _round(mpmath.re(const), digits)
    fs = build_series(ctx, lambda k: _round(coef(k), digits), const, K)
    return AsymptoticExpansion(h=_round(ctx.h, digits), c_const=const, c_log=_round(mpmath.mpf(c_log), digits),
                               fourier=fs, label=label, meta=dict(meta or {}, digits=digits, K=K))


def _two_way(model, what):
    if model.r != 2:
        raise ModelError(f"{what} is defined for two-way splits")


def size_variance_series(model: SplitModel, prec=None, K: int = DEFAULT_K, J=None) -> AsymptoticExpansion:
    """Node-count variance: constant G(-1)/h and c_k = G(-1+chi_k)/h."""
    _two_way(model, "the node-count series")
    with working(model, prec, K) as ctx:
        if model.is_symmetric:
            def G(k):
                return S.size_kernel_symmetric(ctx, ctx.chi(k), J)
        else:
            def G(k):
                return S.size_kernel_general(ctx, ctx.chi(k), J, k=k)
        return _finish(ctx, G(0) / ctx.h, lambda k: G(k) / ctx.h, K, "size")


def multiaccess_variance_series(model: SplitModel, prec=None, K: int = DEFAULT_K, J=None) -> AsymptoticExpansion:
    """Collision-resolution time with r-way splits; equal to the node count when r = 2."""
    with working(model, prec, K) as ctx:
        if model.is_symmetric:
            def G(k):
                return S.size_collision_phi1(ctx, ctx.chi(k), J)
        else:
            def G(k):
                return S.size_kernel_general(ctx, ctx.chi(k), J, k=k)
        return _finish(ctx, G(0) / ctx.h, lambda k: G(k) / ctx.h, K, "multiaccess")


def _epl_asym_parts(ctx):
    p, q = ctx.probs
    h = ctx.h
    lam = p * q * mpmath.log(p / q) ** 2
    l2 = S._log2_sum(ctx)
    return p, q, h, lam, l2


def epl_variance_series(model: SplitModel, prec=None, K: int = DEFAULT_K, J=None) -> AsymptoticExpansion:
    """External path length variance; a log n term appears when p != q."""
    _two_way(model, "the path length series")
    with working(model, prec, K) as ctx:
        if model.is_symmetric:
            L = ctx.h
            return _finish(ctx, S.epl_phi1(ctx, 0, J) / L,
                           lambda k: S.epl_phi1(ctx, ctx.chi(k), J) / L, K, "epl")
        p, q, h, lam, l2 = _epl_asym_parts(ctx)
        phi1 = S.epl_phi1(ctx, 0, J)
        i1 = S.epl_i1(ctx, 0, J)
        d = (phi1 + lam / h ** 2 * (mpmath.euler + 1 + l2 / (2 * h) + (mpmath.log(p) + mpmath.log(q)) / 2)
             + i1)
        const = d / h + lam * l2 / (2 * h ** 4)
        c_log = lam / h ** 3

        def coef(k):
            chi = ctx.chi(k)
            phi2 = lam / h ** 2 * (chi - 1) * specfun.gamma(chi, mpmath.mp.dps) + S.epl_i1(ctx, k, J)
            return (S.epl_phi1(ctx, chi, J) + phi2) / h

        return _finish(ctx, const, coef, K, "epl", c_log=c_log,
                       meta={"Phi1(-1)": phi1, "I1(-1)": i1, "d": d})


def radix_variance_constant(b: int, prec=None, J=None):
    """(1/4 + log 2 + 2 sum_k ((b^k+1)^-2 + log(1+b^-k))) / log b."""
    if b < 2:
        raise ModelError("radix sort needs b >= 2")
    digits = digits_of(prec)
    with mpmath.workdps(digits + 10):
        eps = mpmath.mpf(10) ** (-(digits + 5))

        def terms():
            bk = mpmath.mpf(b)
            while True:
                yield 1 / (bk + 1) ** 2 + mpmath.log1p(1 / bk)
                bk *= b

        tot = sum_until_small(terms(), eps, J, "radix constant").real
        val = (mpmath.mpf(1) / 4 + mpmath.log(2) + 2 * tot) / mpmath.log(b)
    return _round(val, digits)


def radix_variance_series(b: int, prec=None, K: int = DEFAULT_K, J=None) -> AsymptoticExpansion:
    """Radix sort cost with b buckets: c_k = G(-1+chi_k)/log b, chi_k = 2 k pi i / log b."""
    model = symmetric_model(b)
    const = radix_variance_constant(b, prec, J)
    with working(model, prec, K) as ctx:
        ratios = S._sym_ratios
        exp = _finish(ctx, const, lambda k: S.epl_phi1(ctx, ctx.chi(k), J, ratios=ratios(b)) / ctx.h, K,
                      f"radix-{b}")
        series_const = S.epl_phi1(ctx, 0, J, ratios=ratios(b)).real / ctx.h
        exp.meta["series_constant"] = _round(series_const, ctx.digits)
        return exp


def _require_symmetric(model, what):
    if model is not None and not (model.r == 2 and model.is_symmetric):
        raise ModelError(f"{what} is available for p = 1/2 only")


def peripheral_variance_constant(prec=None, J=None):
    """G(-1) = 13/8 - 2 sum_j (-1)^j j (j^2-1) / (2^j - 1) for the peripheral path length."""
    digits = digits_of(prec)
    with mpmath.workdps(digits + 10):
        eps = mpmath.mpf(10) ** (-(digits + 5))

        def terms():
            j = 1
            while True:
                t = mpmath.mpf(j * (j * j - 1)) / (mpmath.mpf(2) ** j - 1)
                yield -t if j % 2 else t
                j += 1

        val = mpmath.mpf(13) / 8 - 2 * sum_until_small(terms(), eps, J, "peripheral constant").real
    return _round(val, digits)


def peripheral_variance_constant_alt(prec=None, J=None):
    """The same constant as 13/8 - 12 sum_j 4^-j (1 + 2^-j)^-4 (positive terms)."""
    digits = digits_of(prec)
    with mpmath.workdps(digits + 10):
        eps = mpmath.mpf(10) ** (-(digits + 5))

        def terms():
            x = mpmath.mpf(1) / 2
            while True:
                yield x * x / (1 + x) ** 4
                x /= 2

        val = mpmath.mpf(13) / 8 - 12 * sum_until_small(terms(), eps, J, "peripheral constant").real
    return _round(val, digits)


def peripheral_variance_series(prec=None, K: int = DEFAULT_K, J=None, model: SplitModel = None) -> AsymptoticExpansion:
    """Peripheral path length at p = 1/2.

    The kernel value G(-1) is reported in ``meta['G(-1)']``; the variance
    per key tends to G(-1)/log 2 on average.
    """
    _require_symmetric(model, "the peripheral variance series")
    model = symmetric_model(2)
    with working(model, prec, K) as ctx:
        g0 = S.peripheral_kernel(ctx, 0, J).real
        exp = _finish(ctx, g0 / ctx.h, lambda k: S.peripheral_kernel(ctx, ctx.chi(k), J) / ctx.h, K,
                      "peripheral", meta={"G(-1)": _round(g0, ctx.digits)})
        return exp


def leader_variance_expansion(prec=None, K: int = DEFAULT_K) -> AsymptoticExpansion:
    """sigma_n^2 = 2n + pi^2/(2 log 2) + (3/log 2) sum_k zeta(2+chi_k) Gamma(2+chi_k) n^{-chi_k}."""
    model = symmetric_model(2)
    with working(model, prec, K) as ctx:
        L = ctx.h
        dps = mpmath.mp.dps

        def coef(k):
            chi = ctx.chi(k)
            return 3 / L * specfun.zeta(2 + chi, dps) * specfun.gamma(2 + chi, dps)

        fs = build_series(ctx, lambda k: _round(coef(k), ctx.digits), _round(mpmath.pi ** 2 / (2 * L), ctx.digits), K)
        return AsymptoticExpansion(h=_round(L, ctx.digits), c_const=fs.mean, c_n=mpmath.mpf(2), fourier=fs,
                                   per_n=False, label="leader", meta={"digits": ctx.digits, "K": K})


def patricia_epl_series(model: SplitModel = None, prec=None, K: int = DEFAULT_K, J=None) -> AsymptoticExpansion:
    """PATRICIA external path length variance, symmetric case."""
    _require_symmetric(model, "the PATRICIA variance series")
    model = symmetric_model(2)
    with working(model, prec, K) as ctx:
        L = ctx.h
        return _finish(ctx, S.patricia_kernel(ctx, 0, J) / L,
                       lambda k: S.patricia_kernel(ctx, ctx.chi(k), J) / L, K, "patricia-epl")


def patricia_variance_constant_alt(prec=None, J=None):
    """1 + 3/(4 log 2) - (2/log 2) sum_j 2^-j (1 + 2^-j)^-2."""
    digits = digits_of(prec)
    with mpmath.workdps(digits + 10):
        eps = mpmath.mpf(10) ** (-(digits + 5))

        def terms():
            x = mpmath.mpf(1) / 2
            while True:
                yield x / (1 + x) ** 2
                x /= 2

        L = mpmath.log(2)
        val = 1 + 3 / (4 * L) - 2 / L * sum_until_small(terms(), eps, J, "PATRICIA constant").real
    return _round(val, digits)
