"""Mellin-side kernels G(s) evaluated on the line s = -1 + chi_k.

Every kernel is an explicit Gamma prefactor plus an alternating j-series whose
Gamma factors come from one gamma call and the upward recurrence.
"""
from __future__ import annotations

import mpmath

from .. import specfun
from .core import SeriesContext, convolution_gamma, gamma_ladder, sum_until_small

EULER = mpmath.euler


def _p_ratios(ctx: SeriesContext):
    """Yields P(j+1)/(1-P(j+1)) for j = 1, 2, ..."""
    j = 1
    while True:
        yield ctx.P_ratio(j + 1)
        j += 1


def _sym_ratios(b: int):
    """1 / (b^j - 1) for j = 1, 2, ...: the ratio above for b equal splits."""
    bj = mpmath.mpf(b)
    while True:
        yield 1 / (bj - 1)
        bj *= b


def _prec(ctx):
    return mpmath.mp.dps


# --- size / multiaccess ------------------------------------------------------

def size_kernel_symmetric(ctx: SeriesContext, chi, J=None, b: int = 2):
    """Variance kernel for the node count with b equal branches at s = -1 + chi.

    For b = 2: (s+1)Gamma(s)(1 - (s^2+4s+8)/2^{s+3})
    + 2 sum_j (-1)^j j (j(j+s+1)-1) Gamma(j+s+1) / ((j+1)! (2^j-1)).
    """
    if b != 2:
        return size_kernel_general(ctx, chi, J)
    s = -1 + chi
    prec = _prec(ctx)
    lad = gamma_ladder(1 + chi, prec)       # Gamma(j + chi) starting at j = 1
    g1 = next(lad)
    head = g1 / (chi - 1) * (1 - (s * s + 4 * s + 8) / mpmath.power(2, s + 3))

    def terms():
        g = g1
        fact = mpmath.mpf(2)      # (j+1)!
        ratios = _sym_ratios(2)
        j = 1
        while True:
            r = next(ratios)
            t = j * (j * (j + s + 1) - 1) * g / fact * r
            yield -t if j % 2 else t
            g = next(lad)
            j += 1
            fact *= j + 1

    return head + 2 * sum_until_small(terms(), ctx.eps, J, "size kernel")


def size_kernel_general(ctx: SeriesContext, chi, J=None, k: int = 0):
    """Variance kernel for the node count under arbitrary split probabilities.

    chi Gamma(-1+chi)(1 - (chi+3)/2^{1+chi}) - (1/h) sum_j Gamma(1+chi_j)Gamma(1+chi_{k-j})
    - 2 sum_{j>=1} (-1)^j (j+1+chi) Gamma(j+chi) R_{j+1} / ((j-1)! (j+1)).
    """
    prec = _prec(ctx)
    lad = gamma_ladder(1 + chi, prec)
    g1 = next(lad)
    head = g1 / (chi - 1) * (1 - (chi + 3) / mpmath.power(2, 1 + chi))
    if ctx.rational:
        conv = convolution_gamma(ctx, k, lambda c: specfun.gamma(1 + c, prec))
    else:
        conv = mpmath.mpf(1)
    head -= conv / ctx.h

    def terms():
        g = g1
        fact = mpmath.mpf(1)      # (j-1)!
        ratios = _p_ratios(ctx)
        j = 1
        while True:
            t = (j + 1 + chi) * g * next(ratios) / (fact * (j + 1))
            yield -t if j % 2 else t
            g = next(lad)
            fact *= j
            j += 1

    return head - 2 * sum_until_small(terms(), ctx.eps, J, "size kernel")


def size_collision_phi1(ctx: SeriesContext, chi, J=None):
    """First part of the multiaccess kernel, with P(j+1)/(1-P(j+1)) weights.

    For equal branches this alone is the whole kernel.
    """
    s = -1 + chi
    prec = _prec(ctx)
    lad = gamma_ladder(1 + chi, prec)
    g1 = next(lad)
    head = g1 / (chi - 1) * (1 - (s * s + 4 * s + 8) / mpmath.power(2, s + 3))

    def terms():
        g = g1
        fact = mpmath.mpf(2)
        ratios = _p_ratios(ctx)
        j = 1
        while True:
            t = j * (j * (j + s + 1) - 1) * g / fact * next(ratios)
            yield -t if j % 2 else t
            g = next(lad)
            j += 1
            fact *= j + 1

    return head + 2 * sum_until_small(terms(), ctx.eps, J, "multiaccess kernel")


# --- external path length / radix ---------------------------------------------

def epl_phi1(ctx: SeriesContext, chi, J=None, ratios=None):
    """Gamma(s+1)(1 - (s^2+s+4)/2^{s+3}) + 2 sum_j (-1)^j (j(s+j)-1) R_{j+1} Gamma(s+j+1)/j!.

    At chi = 0 the head has the limit 1/4 + log 2.
    """
    s = -1 + chi
    prec = _prec(ctx)
    if chi == 0:
        head = mpmath.mpf(1) / 4 + mpmath.log(2)
        lad = gamma_ladder(mpmath.mpf(1), prec)
    else:
        lad = gamma_ladder(chi, prec)
        g0 = next(lad)
        head = g0 * (1 - (s * s + s + 4) / mpmath.power(2, s + 3))
    ratios = ratios if ratios is not None else _p_ratios(ctx)

    def terms():
        j = 1
        fact = mpmath.mpf(1)
        while True:
            g = next(lad)          # Gamma(j + chi); at chi = 0 this is (j-1)!
            t = (j * (s + j) - 1) * next(ratios) * g / fact
            yield -t if j % 2 else t
            j += 1
            fact *= j

    return head + 2 * sum_until_small(terms(), ctx.eps, J, "path length kernel")


def _log2_sum(ctx):
    return mpmath.fsum(pm * mpmath.log(pm) ** 2 for pm in ctx.probs)


def _log3_sum(ctx):
    return mpmath.fsum(pm * mpmath.log(pm) ** 3 for pm in ctx.probs)


def _digamma_factor(chi, grouping: str):
    psi = specfun.digamma(chi, mpmath.mp.dps)
    if grouping == "inner":
        return (1 - chi) * (psi + EULER - chi)
    return (1 - chi) * (psi + EULER) - chi


# which reading of (1-chi)(psi(chi)+gamma - chi) is used; see epl_i1
I1_GROUPING = "outer"


def epl_i1(ctx: SeriesContext, k: int, J=None, grouping: str = None):
    """Correction kernel I1(-1 + chi_k) of the path length variance (two-way)."""
    grouping = grouping or I1_GROUPING
    p, q = ctx.probs
    h = ctx.h
    prec = _prec(ctx)
    if k == 0:
        val = (mpmath.mpf(1) / 4 - mpmath.log(2) + mpmath.pi ** 2 / (6 * h) - 1 / h
               + _log3_sum(ctx) / (6 * h * h) + _log2_sum(ctx) ** 2 / (4 * h ** 3))

        def terms0():
            ratios = _p_ratios(ctx)
            j = 1
            while True:
                t = (j * j - 1) * next(ratios) / j
                yield -t if j % 2 else t
                j += 1

        val -= 2 * sum_until_small(terms0(), ctx.eps, J, "I1 series")
        if ctx.rational:
            def f(c):
                return (c * c - 1) * specfun.gamma(c, prec) * specfun.gamma(-c, prec)
            tot = mpmath.mpf(0)
            for j in _conv_range(ctx, 0):
                if j:
                    tot += f(ctx.chi(j))
            val += tot / h
        return val
    chi = ctx.chi(k)
    lad = gamma_ladder(chi, prec)
    g0 = next(lad)
    val = g0 * (chi - 1 + (chi * chi - 3 * chi + 4) / mpmath.power(2, 2 + chi))
    val += 2 * g0 / h * _digamma_factor(chi, grouping)

    def fj(c):
        return (c - 1) * specfun.gamma(c, prec)

    conv = mpmath.mpc(0)
    for j in _conv_range(ctx, k):
        if j == 0 or j == k:
            continue
        conv += fj(ctx.chi(j)) * fj(ctx.chi(k - j))
    val -= conv / h

    def terms():
        ratios = _p_ratios(ctx)
        j = 1
        fact = mpmath.mpf(1)
        while True:
            g = next(lad)       # Gamma(chi + j)
            t = (j + 1) * (chi + j - 1) * g * next(ratios) / fact
            yield t if j % 2 else -t
            j += 1
            fact *= j

    return val + 2 * sum_until_small(terms(), ctx.eps, J, "I1 series")


def _conv_range(ctx, k):
    import math
    jmax = abs(k) + int(math.ceil(2 * (ctx.digits + 12) * math.log(10) / (math.pi * float(ctx.omega)))) + 2
    return range(-jmax, jmax + abs(k) + 1)


# --- peripheral, PATRICIA -------------------------------------------------------

def peripheral_kernel(ctx: SeriesContext, chi, J=None):
    """Gamma(s+2)(2^{s+1}(s+3) - (s^3+5s^2+22s+24)/16)
    - 2^{s+2} sum_j (-1)^j Gamma(s+j+2)(j(s+j+2)-j-1) / ((j-1)! (2^j-1))."""
    s = -1 + chi
    prec = _prec(ctx)
    lad = gamma_ladder(1 + chi, prec)      # Gamma(s + 2) = Gamma(1 + chi)
    g = next(lad)
    head = g * (mpmath.power(2, s + 1) * (s + 3) - (s ** 3 + 5 * s * s + 22 * s + 24) / 16)

    def terms():
        ratios = _sym_ratios(2)
        j = 1
        fact = mpmath.mpf(1)
        while True:
            gj = next(lad)      # Gamma(s + j + 2) = Gamma(chi + j + 1)
            t = gj * (j * (s + j + 2) - j - 1) * next(ratios) / fact
            yield -t if j % 2 else t
            fact *= j
            j += 1

    return head - mpmath.power(2, s + 2) * sum_until_small(terms(), ctx.eps, J, "peripheral series")


def patricia_kernel(ctx: SeriesContext, chi, J=None):
    """Gamma(s+1)(2^{s+1}(s+2) - (s^2+3s+6)/4) + 2^{s+2} sum_j (-1)^j Gamma(s+j+2)/((j-1)!(2^j-1)).

    At chi = 0 the head has the limit log 2 + 3/4.
    """
    s = -1 + chi
    prec = _prec(ctx)
    if chi == 0:
        head = mpmath.log(2) + mpmath.mpf(3) / 4
        lad = gamma_ladder(mpmath.mpf(2), prec)
    else:
        g0 = specfun.gamma(chi, prec)
        head = g0 * (mpmath.power(2, s + 1) * (s + 2) - (s * s + 3 * s + 6) / 4)
        lad = gamma_ladder(1 + chi, prec)
        next(lad)

    def terms():
        ratios = _sym_ratios(2)
        j = 1
        fact = mpmath.mpf(1)
        while True:
            gj = next(lad)      # Gamma(chi + j + 1)
            t = gj * next(ratios) / fact
            yield -t if j % 2 else t
            fact *= j
            j += 1

    return head + mpmath.power(2, s + 2) * sum_until_small(terms(), ctx.eps, J, "PATRICIA series")
