"""Complex special functions at configurable precision.

Gamma and its logarithmic derivatives come from the Stirling series after an
upward shift of the argument; zeta uses the Borwein acceleration of the
alternating Dirichlet eta series.  mpmath supplies the multiprecision
arithmetic and Bernoulli numbers only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath

__all__ = [
    "Precision",
    "PoleError",
    "gamma",
    "loggamma",
    "digamma",
    "trigamma",
    "zeta",
    "sinh_sum",
]


class PoleError(ValueError):
    """Argument sits on a pole of the requested function."""


@dataclass(frozen=True)
class Precision:
    digits: int = 32

    def __post_init__(self):
        if self.digits < 16:
            raise ValueError("precision must be at least 16 digits")


PrecLike = Union[Precision, int, None]


def _digits(prec: PrecLike) -> int:
    if prec is None:
        return max(16, mpmath.mp.dps)
    if isinstance(prec, Precision):
        return prec.digits
    return max(16, int(prec))


def _is_nonpositive_integer(s) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == mpmath.floor(s.real)


@lru_cache(maxsize=None)
def _bernoulli_table(nterms: int, dps: int) -> tuple:
    with mpmath.workdps(dps):
        return tuple(mpmath.bernoulli(2 * m) for m in range(1, nterms + 1))


def _shift_target(digits: int) -> float:
    # the Stirling series is then accurate to roughly e^{-2 pi |z|}
    return 0.5 * digits + 10


def _shifted(s, digits):
    """Return (z, N) with z = s + N and Re(z) large enough for Stirling."""
    target = _shift_target(digits)
    n = 0
    if s.real < target:
        n = int(math.ceil(target - float(s.real)))
    return s + n, n


def _stirling_loggamma(z, digits):
    eps = mpmath.mpf(10) ** (-(digits + 8))
    res = (z - 0.5) * mpmath.log(z) - z + 0.5 * mpmath.log(2 * mpmath.pi)
    z2 = z * z
    zp = z
    bern = _bernoulli_table(200, digits + 20)
    for m in range(1, 201):
        term = bern[m - 1] / (2 * m * (2 * m - 1) * zp)
        res += term
        if abs(term) < eps * (1 + abs(res)):
            return res
        zp *= z2
    raise ArithmeticError("Stirling series did not converge")


def _as_complex(s):
    s = mpmath.mpmathify(s)
    return mpmath.mpc(s) if not isinstance(s, mpmath.mpc) else s


def _finish(value, real_input):
    if real_input:
        return value.real if isinstance(value, mpmath.mpc) else value
    return value


def loggamma(s, prec: PrecLike = None):
    """Principal branch of log Gamma, analytic off the non-positive real axis."""
    digits = _digits(prec)
    real_input = not isinstance(mpmath.mpmathify(s), mpmath.mpc)
    with mpmath.workdps(digits + 15):
        s = _as_complex(s)
        if _is_nonpositive_integer(s):
            raise PoleError(f"log Gamma has a pole at {s}")
        z, n = _shifted(s, digits)
        res = _stirling_loggamma(z, digits)
        for k in range(n):
            res -= mpmath.log(s + k)
        if real_input and s.real > 0:
            res = res.real
    return +res


def gamma(s, prec: PrecLike = None):
    digits = _digits(prec)
    real_input = not isinstance(mpmath.mpmathify(s), mpmath.mpc)
    with mpmath.workdps(digits + 15):
        s = _as_complex(s)
        if _is_nonpositive_integer(s):
            raise PoleError(f"Gamma has a pole at {s}")
        z, n = _shifted(s, digits)
        res = mpmath.exp(_stirling_loggamma(z, digits))
        den = mpmath.mpf(1)
        for k in range(n):
            den *= s + k
        res /= den
        res = _finish(res, real_input)
    return +res


def digamma(s, prec: PrecLike = None):
    digits = _digits(prec)
    real_input = not isinstance(mpmath.mpmathify(s), mpmath.mpc)
    with mpmath.workdps(digits + 15):
        s = _as_complex(s)
        if _is_nonpositive_integer(s):
            raise PoleError(f"digamma has a pole at {s}")
        z, n = _shifted(s, digits)
        eps = mpmath.mpf(10) ** (-(digits + 8))
        res = mpmath.log(z) - 1 / (2 * z)
        z2 = z * z
        zp = z2
        bern = _bernoulli_table(200, digits + 20)
        for m in range(1, 201):
            term = bern[m - 1] / (2 * m * zp)
            res -= term
            if abs(term) < eps * (1 + abs(res)):
                break
            zp *= z2
        else:
            raise ArithmeticError("digamma series did not converge")
        for k in range(n):
            res -= 1 / (s + k)
        res = _finish(res, real_input)
    return +res


def trigamma(s, prec: PrecLike = None):
    digits = _digits(prec)
    real_input = not isinstance(mpmath.mpmathify(s), mpmath.mpc)
    with mpmath.workdps(digits + 15):
        s = _as_complex(s)
        if _is_nonpositive_integer(s):
            raise PoleError(f"trigamma has a pole at {s}")
        z, n = _shifted(s, digits)
        eps = mpmath.mpf(10) ** (-(digits + 8))
        res = 1 / z + 1 / (2 * z * z)
        z2 = z * z
        zp = z2 * z
        bern = _bernoulli_table(200, digits + 20)
        for m in range(1, 201):
            term = bern[m - 1] / zp
            res += term
            if abs(term) < eps * (1 + abs(res)):
                break
            zp *= z2
        else:
            raise ArithmeticError("trigamma series did not converge")
        for k in range(n):
            res += 1 / (s + k) ** 2
        res = _finish(res, real_input)
    return +res


@lru_cache(maxsize=64)
def _borwein_weights(nterms: int) -> tuple:
    """Partial sums d_k of the Borwein eta acceleration, exact rationals."""
    d = []
    acc = Fraction(0)
    n = nterms
    for i in range(n + 1):
        acc += Fraction(n * math.factorial(n + i - 1) * 4 ** i,
                        math.factorial(n - i) * math.factorial(2 * i))
        d.append(acc)
    return tuple(d)


def zeta(s, prec: PrecLike = None):
    """Riemann zeta on Re(s) > 0 via eta(s) / (1 - 2^(1-s))."""
    digits = _digits(prec)
    real_input = not isinstance(mpmath.mpmathify(s), mpmath.mpc)
    s = mpmath.mpmathify(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if mpmath.re(s) <= 0:
        raise ValueError("zeta is implemented on Re(s) > 0 only")
    t = abs(float(mpmath.im(s)))
    # the error of the n-term rule carries a factor e^{pi |t| / 2}
    guard = int(math.ceil(math.pi * t / 2 / math.log(10))) + 10
    nterms = int(math.ceil(((digits + guard) * math.log(10) + math.log(3 + 6 * t)) / math.log(3 + math.sqrt(8)))) + 2
    with mpmath.workdps(digits + guard + 10):
        s = _as_complex(s)
        d = _borwein_weights(nterms)
        dn = d[-1]
        acc = mpmath.mpf(0)
        for k in range(nterms):
            diff = d[k] - dn
            term = mpmath.mpf(diff.numerator) / diff.denominator / mpmath.power(k + 1, s)
            acc += -term if k % 2 else term
        eta = -acc * dn.denominator / dn.numerator
        res = eta / (1 - mpmath.power(2, 1 - s))
        res = _finish(res, real_input)
    return +res


def sinh_sum(kind: str, base_log, prec: PrecLike = None):
    """Exponentially small kernels sum_j j/sinh(2 j pi^2/L) and the cubic variant.

    ``linear``: sum_{j>=1} j / sinh(2 j pi^2 / L);
    ``cubic``:  sum_{k>=1} k ((2 k pi)^2 + L^2) / sinh(2 k pi^2 / L).
    """
    digits = _digits(prec)
    if kind not in ("linear", "cubic"):
        raise ValueError(f"unknown sinh kernel {kind!r}")
    with mpmath.workdps(digits + 15):
        L = mpmath.mpf(base_log)
        if L <= 0:
            raise ValueError("base_log must be positive")
        eps = mpmath.mpf(10) ** (-(digits + 5))
        total = mpmath.mpf(0)
        j = 1
        while True:
            arg = 2 * j * mpmath.pi ** 2 / L
            if kind == "linear":
                term = j / mpmath.sinh(arg)
            else:
                term = j * ((2 * j * mpmath.pi) ** 2 + L * L) / mpmath.sinh(arg)
            total += term
            if abs(term) < eps * abs(total) or j > 100000:
                break
            j += 1
    return +total
