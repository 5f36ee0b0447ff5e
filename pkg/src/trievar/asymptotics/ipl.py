"""Internal path length: log-level periodic expansions of mean, variance and covariance.

With s0 = -1 + chi_k and L = log 2,

    V(X_n)/n      = F02 (log n)^2/L^2 + F2 log n / L + F3,
    Cov(N_n,X_n)/n = F02 log n / L + F11,

where F02 has coefficients G1(s0)/L (the node-count kernel),
F2: -2 (G1'(s0) - G2(s0) L)/L^2, F3: (G1''(s0) - 2 G2'(s0) L)/L^3 and
F11: -(G1'(s0) - G2(s0) L)/L^2.
"""
from __future__ import annotations

import mpmath

from .. import specfun
from ..model import ModelError, SplitModel, symmetric_model
from .core import DEFAULT_K, AsymptoticExpansion, FourierSeries, build_series, sum_until_small
from .variance import _round, digits_of, working

__all__ = ["ipl_expansion", "ipl_covariance_expansion", "ipl_mean_expansion", "ipl_kernels"]


def _terms(s, kind, order, eps, J):
    """sum_j w_j d^order/ds^order T_j(s), T_j = (j(j+1+s)-1) Gamma(s+j+1).

    kind 'c': w_j = (-1)^j j / ((j+1)! (2^j-1))
    kind 'd': w_j = (-1)^j j 2^j / ((j+1)! (2^j-1)^2)
    """
    dps = mpmath.mp.dps
    x = s + 2                       # argument of Gamma for j = 1
    g = specfun.gamma(x, dps)
    psi = specfun.digamma(x, dps) if order else 0
    psi1 = specfun.trigamma(x, dps) if order > 1 else 0

    def gen():
        nonlocal g, psi, psi1, x
        j = 1
        fact = mpmath.mpf(2)
        two = mpmath.mpf(2)
        while True:
            if kind == "c":
                w = j / (fact * (two - 1))
            else:
                w = j * two / (fact * (two - 1) ** 2)
            poly = j * (j + 1 + s) - 1
            if order == 0:
                t = poly * g
            elif order == 1:
                t = j * g + poly * g * psi
            else:
                t = 2 * j * g * psi + poly * g * (psi * psi + psi1)
            t *= w
            yield -t if j % 2 else t
            # advance x -> x + 1
            if order:
                psi += 1 / x
            if order > 1:
                psi1 -= 1 / (x * x)
            g *= x
            x += 1
            j += 1
            fact *= j + 1
            two *= 2

    return sum_until_small(gen(), eps, J, "internal path length series")


def ipl_kernels(ctx, s, J=None):
    """(G1, G1', G1'', G2, G2') at s, analytically."""
    L = mpmath.log(2)
    dps = mpmath.mp.dps
    eps = ctx.eps
    g = specfun.gamma(s + 2, dps)
    psi = specfun.digamma(s + 2, dps)
    psi1 = specfun.trigamma(s + 2, dps)
    u = g / s
    a = psi - 1 / s
    u1 = u * a
    u2 = u * (a * a + psi1 + 1 / (s * s))
    e = mpmath.power(2, -s - 3)
    poly = s * s + 4 * s + 8
    B = 1 - poly * e
    B1 = -(2 * s + 4) * e + poly * L * e
    B2 = -2 * e + 2 * (2 * s + 4) * L * e - poly * L * L * e
    G1 = u * B + 2 * _terms(s, "c", 0, eps, J)
    G1d = u1 * B + u * B1 + 2 * _terms(s, "c", 1, eps, J)
    G1dd = u2 * B + 2 * u1 * B1 + u * B2 + 2 * _terms(s, "c", 2, eps, J)
    G2 = _terms(s, "d", 0, eps, J)
    G2d = _terms(s, "d", 1, eps, J)
    return G1, G1d, G1dd, G2, G2d


def _check(model):
    if model is not None and not (model.r == 2 and model.is_symmetric):
        raise ModelError("internal path length variance is available for p = 1/2 only")


def _levels(prec, K, J):
    model = symmetric_model(2)
    with working(model, prec, K) as ctx:
        L = ctx.h
        cache = {}

        def kern(k):
            if k not in cache:
                cache[k] = ipl_kernels(ctx, -1 + ctx.chi(k), J)
            return cache[k]

        def f02(k):
            return kern(k)[0] / L

        def f2(k):
            _, G1d, _, G2, _ = kern(k)
            return -2 * (G1d - G2 * L) / L ** 2

        def f3(k):
            _, _, G1dd, _, G2d = kern(k)
            return (G1dd - 2 * G2d * L) / L ** 3

        def f11(k):
            _, G1d, _, G2, _ = kern(k)
            return -(G1d - G2 * L) / L ** 2

        d = ctx.digits
        out = {}
        for name, f in (("f02", f02), ("f2", f2), ("f3", f3), ("f11", f11)):
            mean = _round(mpmath.re(f(0)), d)
            out[name] = build_series(ctx, lambda k, f=f: _round(f(k), d), mean, K)
        return ctx, out


def ipl_expansion(prec=None, K: int = DEFAULT_K, J=None, model: SplitModel = None) -> AsymptoticExpansion:
    """V(X_n)/n for the internal path length at p = 1/2."""
    _check(model)
    ctx, lv = _levels(prec, K, J)
    d = ctx.digits
    L = _round(ctx.h, d)
    return AsymptoticExpansion(
        h=L, c_log2=lv["f02"].mean, c_log=_round(lv["f2"].mean / ctx.h, d), c_const=lv["f3"].mean,
        fourier_log2=lv["f02"], fourier_log=_scaled(lv["f2"], 1 / ctx.h, d), fourier=lv["f3"],
        label="ipl", meta={"digits": d, "K": K, "F2": lv["f2"], "F11": lv["f11"]})


def ipl_covariance_expansion(prec=None, K: int = DEFAULT_K, J=None, model: SplitModel = None) -> AsymptoticExpansion:
    """Cov(N_n, X_n)/n (node count against internal path length) at p = 1/2."""
    _check(model)
    ctx, lv = _levels(prec, K, J)
    d = ctx.digits
    return AsymptoticExpansion(
        h=_round(ctx.h, d), c_log=_round(lv["f02"].mean / ctx.h, d), c_const=lv["f11"].mean,
        fourier_log=_scaled(lv["f02"], 1 / ctx.h, d), fourier=lv["f11"],
        label="ipl covariance", meta={"digits": d, "K": K})


def _scaled(fs, factor, digits):
    coeffs = {k: _round(c * factor, digits) for k, c in fs.coeffs.items()}
    return FourierSeries(coeffs, _round(fs.mean * factor, digits), fs.log_base,
                         _round(fs.tail * factor, digits) if fs.tail != mpmath.inf else fs.tail)


def ipl_mean_expansion(model: SplitModel = None, prec=None, K: int = DEFAULT_K) -> AsymptoticExpansion:
    """E(X_n)/n = (1/h + F[G10]) log n / h + const + F[G01]/h."""
    model = model or symmetric_model(2)
    if model.r != 2:
        raise ModelError("internal path length is defined for two-way splits")
    digits = digits_of(prec)
    with working(model, prec, K) as ctx:
        h = ctx.h
        dps = mpmath.mp.dps
        l2 = mpmath.fsum(pm * mpmath.log(pm) ** 2 for pm in ctx.probs)
        const = l2 / h ** 3 + (mpmath.euler - 1) / h ** 2 - 1 / h

        def g10(k):
            chi = ctx.chi(k)
            return -specfun.gamma(1 + chi, dps) / (chi - 1) / h ** 2

        def g01(k):
            s = -1 + ctx.chi(k)
            return (specfun.gamma(s, dps) * ((specfun.digamma(s, dps) + h - l2 / h) * (1 + s) + 1)) / h ** 2

        c_log = _round(1 / h ** 2, digits)
        const = _round(const, digits)
        return AsymptoticExpansion(
            h=_round(h, digits), c_const=const, c_log=c_log,
            fourier_log=build_series(ctx, lambda k: _round(g10(k), digits), c_log, K),
            fourier=build_series(ctx, lambda k: _round(g01(k), digits), const, K),
            label="ipl mean", meta={"digits": digits, "K": K})
