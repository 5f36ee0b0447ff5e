"""Poisson-Charlier correction polynomials and analytic depoissonization."""
from __future__ import annotations

from math import comb
from typing import Callable, Sequence

import mpmath

__all__ = ["tau", "depoissonize"]


def _falling(n: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= n - i
    return out


def tau(j: int, n: int) -> int:
    """tau_j(n) = sum_l C(j, l) (-n)^l n^{(j-l) falling}, exactly.

    These are the weights in a_n = sum_j f^{(j)}(n) tau_j(n) / j! for the
    coefficients of e^{z} f(z).
    """
    if j < 0 or n < 0:
        raise ValueError("tau needs j >= 0 and n >= 0")
    return sum(comb(j, l) * (-n) ** l * _falling(n, j - l) for l in range(j + 1))


def depoissonize(derivs: Sequence, n: int, order: int = 2, digits: int = 32):
    """Approximate a_n from the Poisson transform f and its derivatives at z = n.

    ``derivs`` is either a sequence [f(n), f'(n), f''(n), ...] or a callable
    returning the j-th derivative at n.  Terms j < 2 * order are used.
    """
    jmax = 2 * order
    with mpmath.workdps(digits + 10):
        tot = mpmath.mpf(0)
        for j in range(jmax):
            dj = derivs(j) if callable(derivs) else derivs[j]
            t = tau(j, n)
            if t:
                tot += mpmath.mpmathify(dj) * t / mpmath.factorial(j)
    return +tot
