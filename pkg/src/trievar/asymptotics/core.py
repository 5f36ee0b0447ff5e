"""Containers for periodic and log-polynomial expansions, and their evaluation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath

from ..model import ModelError, SplitModel, mp_log_base
from .. import specfun

__all__ = [
    "FourierSeries",
    "AsymptoticExpansion",
    "TruncationError",
    "evaluate",
    "evaluate_fluctuation",
    "DEFAULT_K",
    "DEFAULT_DIGITS",
]

DEFAULT_K = 10
DEFAULT_DIGITS = 32


class TruncationError(ArithmeticError):
    """A series could not be summed to the requested tolerance within its term cap."""


@dataclass(frozen=True)
class FourierSeries:
    """Period-1 function sum_k c_k e^{2 pi i k x} with x = log n / log_base.

    ``coeffs`` holds k != 0 only (both signs); ``mean`` is the k = 0 value.
    With this convention the term of index k equals c_k n^{-chi_k}.
    """

    coeffs: dict
    mean: object
    log_base: object
    tail: object = 0

    @classmethod
    def empty(cls, mean=0, log_base=1) -> "FourierSeries":
        return cls({}, mean, log_base, 0)

    @property
    def K(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def amplitude(self):
        """sum_{k != 0} |c_k| (bound on the oscillating part)."""
        return mpmath.fsum(abs(c) for c in self.coeffs.values())

    def oscillation(self, x):
        """The k != 0 part at phase x (real)."""
        if not self.coeffs:
            return mpmath.mpf(0)
        tot = mpmath.mpc(0)
        for k, c in self.coeffs.items():
            tot += c * mpmath.expjpi(2 * k * x)
        return tot

    def phase(self, n):
        return mpmath.log(n) / self.log_base

    def __call__(self, x):
        return self.mean + self.oscillation(x).real


@dataclass(frozen=True)
class AsymptoticExpansion:
    """c_n n + c_log2 (log n)^2/h^2 + c_log log n + c_const + periodic parts.

    ``fourier`` oscillates at the constant level, ``fourier_log`` multiplies
    log n and ``fourier_log2`` multiplies (log n)^2/h^2.  ``per_n`` tells
    whether the expansion describes a moment divided by n (the usual case)
    or the moment itself (leader election).
    """

    h: object
    c_const: object
    c_log: object = 0
    c_log2: object = 0
    c_n: object = 0
    fourier: Optional[FourierSeries] = None
    fourier_log: Optional[FourierSeries] = None
    fourier_log2: Optional[FourierSeries] = None
    per_n: bool = True
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def coefficient_rows(self, level: str = "const"):
        """(k, c_k) rows for k = -K..K at the given level, k = 0 holding the mean."""
        fs = {"const": self.fourier, "log": self.fourier_log, "log2": self.fourier_log2}[level]
        mean = {"const": self.c_const, "log": self.c_log, "log2": self.c_log2}[level]
        rows = [(0, mean)]
        if fs is not None:
            rows += sorted(fs.coeffs.items())
        return sorted(rows)


def _imag_check(value, digits):
    tol = mpmath.mpf(10) ** (-(digits - 6)) * (1 + abs(value))
    if abs(mpmath.im(value)) > tol:
        raise ArithmeticError(f"expansion not real: imaginary part {mpmath.im(value)}")


def evaluate_fluctuation(expansion: AsymptoticExpansion, n):
    """Only the oscillating (k != 0) contributions at n."""
    logn = mpmath.log(n)
    tot = mpmath.mpc(0)
    for fs, mult in ((expansion.fourier, 1),
                     (expansion.fourier_log, logn),
                     (expansion.fourier_log2, logn ** 2 / mpmath.mpf(expansion.h) ** 2)):
        if fs is not None and fs.coeffs:
            tot += fs.oscillation(fs.phase(n)) * mult
    return tot


def evaluate(expansion: AsymptoticExpansion, n, digits: int = DEFAULT_DIGITS):
    """Real value of the expansion at n >= 2."""
    if n < 2:
        raise ValueError("expansions are evaluated at n >= 2")
    with mpmath.workdps(digits + 10):
        n = mpmath.mpf(n)
        logn = mpmath.log(n)
        h = mpmath.mpf(expansion.h)
        val = (mpmath.mpf(expansion.c_n) * n + mpmath.mpf(expansion.c_log2) * logn ** 2 / h ** 2
               + mpmath.mpf(expansion.c_log) * logn + mpmath.mpf(expansion.c_const))
        osc = evaluate_fluctuation(expansion, n)
        _imag_check(osc, digits)
        val += osc.real
    return +val


# ---------------------------------------------------------------------------
# helpers shared by the series evaluators


class SeriesContext:
    """Model constants at working precision: probabilities, entropy, chi_k."""

    def __init__(self, model: SplitModel, digits: int, K: int = 0):
        self.model = model
        self.digits = digits
        self.K = K
        self.probs = model.mp_probs()
        self.h = model.mp_entropy()
        self.rational = model.is_rational
        if self.rational:
            self.log_base = mp_log_base(model)
            self.omega = 2 * mpmath.pi / self.log_base
        else:
            self.log_base = None
            self.omega = None
        self.eps = mpmath.mpf(10) ** (-(digits + 5))

    def chi(self, k: int):
        """chi_k as an mpc; n^{-chi_k} = e^{2 pi i k log n / log_base}."""
        if k == 0:
            return mpmath.mpc(0)
        if not self.rational:
            raise ModelError("no Fourier modes for an irrational model")
        return mpmath.mpc(0, -k * self.omega)

    def P(self, s):
        return mpmath.fsum(pm ** s for pm in self.probs)

    def P_ratio(self, j: int):
        """P(j) / (1 - P(j))."""
        pj = self.P(j)
        return pj / (1 - pj)


def guard_digits(ctx_omega, K: int) -> int:
    """Extra digits lost to cancellation in the alternating Gamma series at mode K."""
    if ctx_omega is None or K == 0:
        return 10
    t = float(ctx_omega) * K
    return int(math.ceil(t / math.log(10))) + 10


def gamma_ladder(a, prec):
    """Generator of Gamma(a), Gamma(a+1), ... by the upward recurrence."""
    g = specfun.gamma(a, prec)
    j = 0
    while True:
        yield g
        g = g * (a + j)
        j += 1


def sum_until_small(terms, eps, J: Optional[int], what: str, min_terms: int = 4):
    """Sum an iterator of terms until three consecutive |terms| < eps."""
    cap = J if J is not None else 100000
    tot = mpmath.mpc(0)
    small = 0
    for j, t in enumerate(terms, start=1):
        tot += t
        if abs(t) < eps:
            small += 1
            if small >= 3 and j >= min_terms:
                return tot
        else:
            small = 0
        if j >= cap:
            break
    raise TruncationError(f"{what}: series not converged after {cap} terms")


def convolution_gamma(ctx: SeriesContext, k: int, f: Callable, skip=()):
    """sum_{j in Z} f(chi_j) f(chi_{k-j}), truncated by Gamma decay.

    ``f`` must decay like |Gamma(1 + i t)| along the imaginary axis.
    """
    tot = mpmath.mpc(0)
    # |Gamma(1+it)| ~ sqrt(2 pi t) e^{-pi t / 2}; stop when both factors are negligible
    jmax = abs(k) + int(math.ceil(2 * (ctx.digits + 12) * math.log(10) / (math.pi * float(ctx.omega)))) + 2
    for j in range(-jmax, jmax + abs(k) + 1):
        if j in skip or (k - j) in skip:
            continue
        tot += f(ctx.chi(j)) * f(ctx.chi(k - j))
    return tot


def fourier_tail(coeffs: dict):
    """Geometric extrapolation of the neglected |c_k|, |k| > K."""
    if not coeffs:
        return mpmath.mpf(0)
    K = max(coeffs)
    if K < 2:
        return abs(coeffs[K])
    a, b = abs(coeffs[K - 1]), abs(coeffs[K])
    if a == 0:
        return mpmath.mpf(0)
    ratio = b / a
    if ratio >= 1:
        return mpmath.inf
    return 2 * b * ratio / (1 - ratio)


def build_series(ctx: SeriesContext, coef: Callable[[int], object], mean, K: int) -> FourierSeries:
    """Fourier series with c_k = coef(k) for 1 <= k <= K and c_{-k} = conj(c_k)."""
    if not ctx.rational or K == 0:
        return FourierSeries({}, mean, ctx.log_base if ctx.log_base is not None else 1, 0)
    coeffs = {}
    for k in range(1, K + 1):
        c = mpmath.mpc(coef(k))
        coeffs[k] = c
        coeffs[-k] = mpmath.conj(c)
    return FourierSeries(coeffs, mean, ctx.log_base, fourier_tail(coeffs))
