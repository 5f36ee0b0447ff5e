"""Exact first and second moments from the splitting recurrences.

Every solver walks n upward, rebuilding the row of split weights by the
Pascal update and solving for the new moment after isolating the
self-referential terms (splits that send all keys into one branch).

Arithmetic is carried out on numpy object arrays of gmpy2 ``mpfr`` numbers
at the requested number of decimal digits, or on plain float64 arrays when
``digits <= 15``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import gmpy2
import mpmath
import numpy as np

from .model import (
    ModelError,
    SplitModel,
    StatKind,
    StatisticSpec,
    TollSpec,
    parse_prob,
    toll_for,
)

__all__ = [
    "MomentTable",
    "CoupledMomentTable",
    "WorkBudgetExceeded",
    "solve_trie_mean",
    "solve_trie_second",
    "solve_trie",
    "solve_patricia",
    "solve_leader_election",
    "solve_internal_path_length",
    "solve_multiway",
    "solve_statistic",
    "hadamard_product",
    "to_mpf",
    "DEFAULT_DIGITS",
    "DEFAULT_WORK_BUDGET",
]

DEFAULT_DIGITS = 32
DEFAULT_WORK_BUDGET = 2 * 10 ** 9


class WorkBudgetExceeded(RuntimeError):
    """Requested solve is larger than the configured arithmetic budget."""


# ---------------------------------------------------------------------------
# arithmetic backend


class _Arith:
    """Number factory for one solve: float64 or mpfr at a fixed precision."""

    def __init__(self, digits: int):
        self.digits = int(digits)
        self.is_float = self.digits <= 15
        self.bits = int(math.ceil(self.digits * math.log2(10))) + 16
        if self.is_float:
            self.ctx = None
        else:
            self.ctx = gmpy2.context(gmpy2.get_context(), precision=self.bits)

    def __enter__(self):
        if self.ctx is not None:
            self._cm = self.ctx
            self._cm.__enter__()
        return self

    def __exit__(self, *exc):
        if self.ctx is not None:
            self._cm.__exit__(*exc)
        return False

    def num(self, x):
        if self.is_float:
            return float(x)
        if isinstance(x, (mpmath.mpf,)):
            man, exp = x.man_exp
            return gmpy2.mul_2exp(gmpy2.mpfr(int(man)), int(exp))
        return gmpy2.mpfr(x)

    def zeros(self, n: int):
        if self.is_float:
            return np.zeros(n)
        z = gmpy2.mpfr(0)
        return np.array([z] * n, dtype=object)

    def ones(self, n: int):
        if self.is_float:
            return np.ones(n)
        o = gmpy2.mpfr(1)
        return np.array([o] * n, dtype=object)


def _model_probs(model: SplitModel, ar: _Arith):
    if model.exact_probs is not None:
        with mpmath.workdps(ar.digits + 20):
            return [ar.num(parse_prob(e)) for e in model.exact_probs]
    ps = [ar.num(x) for x in model.probs[:-1]]
    last = ar.num(1)
    for x in ps:
        last = last - x
    return ps + [last]


def to_mpf(x):
    """Convert a backend number to an mpmath mpf without losing bits."""
    if isinstance(x, float):
        return mpmath.mpf(x)
    if isinstance(x, type(gmpy2.mpfr(0))):
        man, exp = x.as_mantissa_exp()
        return mpmath.mpf((int(man), int(exp)))
    return mpmath.mpmathify(x)


def _frozen(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class MomentTable:
    n_max: int
    mean: np.ndarray
    second: np.ndarray
    variance: np.ndarray
    digits: int
    label: str = ""

    def mp(self, name: str, n: int):
        """Entry ``name`` ('mean', 'second', 'variance') at ``n`` as an mpf."""
        return to_mpf(getattr(self, name)[n])

    def variance_over_n(self, n: int):
        return self.mp("variance", n) / n

    def rows(self):
        for n in range(self.n_max + 1):
            yield n, self.mean[n], self.second[n], self.variance[n]


@dataclass(frozen=True)
class CoupledMomentTable:
    n_max: int
    mean_N: np.ndarray
    mean_X: np.ndarray
    second_N: np.ndarray
    cross_NX: np.ndarray
    second_X: np.ndarray
    var_N: np.ndarray
    var_X: np.ndarray
    cov_NX: np.ndarray
    digits: int
    label: str = "ipl"

    def mp(self, name: str, n: int):
        return to_mpf(getattr(self, name)[n])

    def as_moment_table(self) -> MomentTable:
        """The internal path length marginal as a plain table."""
        return MomentTable(self.n_max, self.mean_X, self.second_X, self.var_X,
                           self.digits, self.label)


def _check_args(n_max: int, digits: int):
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if digits <= 15 and n_max > 1024:
        raise ValueError("hardware precision is limited to n_max <= 1024; raise digits")


# ---------------------------------------------------------------------------
# two-way tries and PATRICIA


def _toll_terms(toll: TollSpec, n: int, w, mu, mu_n, ar):
    """(mean toll, toll part of the second moment) at size n under weights w."""
    if toll.conditional is None:
        t = ar.num(toll.mean_toll(n))
        t2 = ar.num(toll.second_toll(n))
        # sum_k w_k (mu_k + mu_{n-k}) equals mu_n - t once mu_n is known
        return t, (lambda: t2 + 2 * t * (mu_n() - t))
    support = sorted({1, n - 1}) if n >= 2 else []
    cs = [(k, ar.num(toll.conditional(n, k))) for k in support]
    t = sum((w[k] * c for k, c in cs), ar.num(0))

    def second():
        acc = ar.num(0)
        for k, c in cs:
            acc += w[k] * (c * c + 2 * c * (mu[k] + mu[n - k]))
        return acc
    return t, second


def _two_way_pass(model: SplitModel, toll: TollSpec, init, n_max: int, digits: int,
                  patricia: bool = False, want_second: bool = True, mean_seq=None):
    if model.r != 2:
        raise ModelError("two-way solver needs r = 2; use solve_multiway")
    _check_args(n_max, digits)
    with _Arith(digits) as ar:
        p, q = _model_probs(model, ar)
        a, b = (ar.num(init[0]), ar.num(init[1]))
        mu = ar.zeros(n_max + 1)
        s = ar.zeros(n_max + 1)
        mu[0], mu[1] = a, b
        s[0], s[1] = a * a, b * b
        if mean_seq is not None:
            mu[:] = [ar.num(to_mpf(x)) if not ar.is_float else float(x) for x in mean_seq[: n_max + 1]]
        w = ar.ones(1)
        one = ar.num(1)
        for n in range(1, n_max + 1):
            nw = ar.zeros(n + 1)
            nw[1:] = p * w
            nw[:-1] += q * w
            w = nw
            if n < 2:
                continue
            if patricia:
                ww = w.copy()
                ww[0] = ww[n] = ar.num(0)
                ww = ww / (one - w[0] - w[n])
                selfc = ar.num(0)
            else:
                ww = w
                selfc = w[0] + w[n]
            W = ww + ww[::-1]
            denom = one - selfc
            t, second_toll = _toll_terms(toll, n, ww, mu, lambda: mu[n], ar)
            if mean_seq is None:
                mu[n] = ar.num(0)
                mu[n] = (np.dot(W, mu[: n + 1]) + t) / denom
            if want_second:
                s[n] = ar.num(0)
                m = mu[: n + 1]
                rhs = np.dot(W, s[: n + 1]) + 2 * np.dot(ww, m * m[::-1]) + second_toll()
                s[n] = rhs / denom
        return mu, s


def _table(mu, s, n_max, digits, label):
    with _Arith(digits):
        var = s - mu * mu
    return MomentTable(n_max, _frozen(mu), _frozen(s), _frozen(var), digits, label)


def solve_trie_mean(model: SplitModel, toll: TollSpec, init=(0, 0), n_max: int = 64,
                    digits: int = DEFAULT_DIGITS):
    mu, _ = _two_way_pass(model, toll, init, n_max, digits, want_second=False)
    return _frozen(mu)


def solve_trie_second(model: SplitModel, toll: TollSpec, mean_seq, init=(0, 0),
                      n_max: int = 64, digits: int = DEFAULT_DIGITS):
    if len(mean_seq) < n_max + 1:
        raise ValueError("mean_seq must cover 0..n_max")
    _, s = _two_way_pass(model, toll, init, n_max, digits, mean_seq=mean_seq)
    return _frozen(s)


def solve_trie(model: SplitModel, toll: TollSpec, init=(0, 0), n_max: int = 64,
               digits: int = DEFAULT_DIGITS, label: str = "") -> MomentTable:
    """Mean and second moment in a single pass over the weight rows."""
    mu, s = _two_way_pass(model, toll, init, n_max, digits)
    return _table(mu, s, n_max, digits, label)


def solve_patricia(model: SplitModel, toll: TollSpec, n_max: int = 64,
                   digits: int = DEFAULT_DIGITS, label: str = "patricia") -> MomentTable:
    mu, s = _two_way_pass(model, toll, (0, 0), n_max, digits, patricia=True)
    return _table(mu, s, n_max, digits, label)


# ---------------------------------------------------------------------------
# leader election


def solve_leader_election(n_max: int = 64, digits: int = DEFAULT_DIGITS) -> MomentTable:
    """X_n = n + X_K with K ~ Binom(n, 1/2); K in {0, n} restarts the round."""
    _check_args(n_max, digits)
    with _Arith(digits) as ar:
        half = ar.num(1) / 2
        one = ar.num(1)
        mu = ar.zeros(n_max + 1)
        s = ar.zeros(n_max + 1)
        w = ar.ones(1)
        for n in range(1, n_max + 1):
            nw = ar.zeros(n + 1)
            nw[1:] = half * w
            nw[:-1] += half * w
            w = nw
            if n < 2:
                continue
            denom = one - w[0] - w[n]
            inner = w[1:n]
            mu[n] = (n + np.dot(inner, mu[1:n])) / denom
            s[n] = (n * n + 2 * n * (mu[n] - n) + np.dot(inner, s[1:n])) / denom
        return _table(mu, s, n_max, digits, "leader")


# ---------------------------------------------------------------------------
# internal path length (coupled with the node count)


def solve_internal_path_length(model: SplitModel, n_max: int = 64,
                               digits: int = DEFAULT_DIGITS) -> CoupledMomentTable:
    """Moments of N_n (internal nodes) and X_n (internal path length), root at depth 0.

    With A = N_I + N*_{n-I} and B = X_I + X*_{n-I} the system reads
    N_n = A + 1 and X_n = B + A, so every second moment is a combination of
    E(A^2), E(AB), E(B^2) conditioned on the split.
    """
    if model.r != 2:
        raise ModelError("internal path length is implemented for two-way splits")
    _check_args(n_max, digits)
    with _Arith(digits) as ar:
        p, q = _model_probs(model, ar)
        one = ar.num(1)
        mN, mX, sN, cNX, sX = (ar.zeros(n_max + 1) for _ in range(5))
        w = ar.ones(1)
        zero = ar.num(0)
        for n in range(1, n_max + 1):
            nw = ar.zeros(n + 1)
            nw[1:] = p * w
            nw[:-1] += q * w
            w = nw
            if n < 2:
                continue
            W = w + w[::-1]
            denom = one - w[0] - w[n]
            sl = slice(0, n + 1)

            mN[n] = zero
            mN[n] = (np.dot(W, mN[sl]) + one) / denom
            EA = mN[n] - one

            mX[n] = zero
            mX[n] = (np.dot(W, mX[sl]) + EA) / denom

            a = mN[sl]
            x = mX[sl]
            sN[n] = zero
            sN[n] = (np.dot(W, sN[sl]) + 2 * np.dot(w, a * a[::-1]) + 2 * EA + one) / denom
            EA2 = sN[n] - 2 * EA - one

            cNX[n] = zero
            cross = np.dot(W, a * x[::-1])
            cNX[n] = (EA2 + np.dot(W, cNX[sl]) + cross + mX[n]) / denom
            EAB = cNX[n] - EA2 - mX[n]

            sX[n] = zero
            sX[n] = (EA2 + 2 * EAB + np.dot(W, sX[sl]) + 2 * np.dot(w, x * x[::-1])) / denom
        var_N = sN - mN * mN
        var_X = sX - mX * mX
        cov = cNX - mN * mX
        return CoupledMomentTable(n_max, *(_frozen(v) for v in (mN, mX, sN, cNX, sX, var_N, var_X, cov)),
                                  digits=digits)


# ---------------------------------------------------------------------------
# r-way splitting


def solve_multiway(model: SplitModel, toll: TollSpec, init=(0, 0), n_max: int = 64,
                   digits: int = DEFAULT_DIGITS, work_budget: int = DEFAULT_WORK_BUDGET,
                   label: str = "") -> MomentTable:
    """Moments for r-way splits via a sequential-binomial decomposition.

    The multinomial split is generated as N_1 ~ Bin(c, p_1), then
    N_2 ~ Bin(c - N_1, p_2/(1 - p_1)), and so on.  For the suffix sums of
    child means S_m = sum_{j >= m} mu_{N_j} the tables

        E_m(c) = E(S_m | c keys left),
        F_m(c) = E(sum_{j>=m} s_{N_j} + 2 sum_{m<=j<l} mu_{N_j} mu_{N_l} | c)

    are filled by backward recursion over m; each new n only adds one column,
    so the total cost is O(r n_max^2).
    """
    r = model.r
    if r * n_max * n_max > work_budget:
        raise WorkBudgetExceeded(f"r*n_max^2 = {r * n_max * n_max} exceeds budget {work_budget}")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if toll.conditional is not None:
        raise ModelError("split-dependent tolls are only supported for two-way splits")
    with _Arith(digits) as ar:
        ps = _model_probs(model, ar)
        one = ar.num(1)
        zero = ar.num(0)
        # conditional branch probabilities p_m / (p_m + ... + p_r)
        cond = []
        tail = one
        for m in range(r):
            cond.append(ps[m] / tail if m < r - 1 else one)
            tail = tail - ps[m]
        a, b = ar.num(init[0]), ar.num(init[1])
        mu = ar.zeros(n_max + 1)
        s = ar.zeros(n_max + 1)
        mu[0], mu[1] = a, b
        s[0], s[1] = a * a, b * b
        # E[m][c], F[m][c] for branches m = 0..r-1 (0-based); index r is empty
        E = [ar.zeros(n_max + 1) for _ in range(r + 1)]
        F = [ar.zeros(n_max + 1) for _ in range(r + 1)]
        # marginal rows for the mean and conditional rows for the DP
        marg = [ar.ones(1) for _ in range(r)]
        rows = [ar.ones(1) for _ in range(r)]

        def fill_column(c, mu_c, s_c):
            E[r - 1][c] = mu_c
            F[r - 1][c] = s_c
            for m in range(r - 2, -1, -1):
                row = rows[m]
                rev_E = E[m + 1][c::-1]
                rev_F = F[m + 1][c::-1]
                mk = mu[: c + 1].copy()
                sk = s[: c + 1].copy()
                mk[c], sk[c] = mu_c, s_c
                E[m][c] = np.dot(row, mk + rev_E)
                F[m][c] = np.dot(row, sk + 2 * mk * rev_E + rev_F)

        for c in (0, 1):
            if c >= 1:
                for m in range(r - 1):
                    nr = ar.zeros(c + 1)
                    nr[1:] = cond[m] * rows[m]
                    nr[:-1] += (one - cond[m]) * rows[m]
                    rows[m] = nr
                    nm = ar.zeros(c + 1)
                    nm[1:] = ps[m] * marg[m]
                    nm[:-1] += (one - ps[m]) * marg[m]
                    marg[m] = nm
                nm = ar.zeros(c + 1)
                nm[1:] = ps[r - 1] * marg[r - 1]
                nm[:-1] += (one - ps[r - 1]) * marg[r - 1]
                marg[r - 1] = nm
            fill_column(c, mu[c], s[c])

        for n in range(2, n_max + 1):
            for m in range(r):
                if m < r - 1:
                    nr = ar.zeros(n + 1)
                    nr[1:] = cond[m] * rows[m]
                    nr[:-1] += (one - cond[m]) * rows[m]
                    rows[m] = nr
                nm = ar.zeros(n + 1)
                nm[1:] = ps[m] * marg[m]
                nm[:-1] += (one - ps[m]) * marg[m]
                marg[m] = nm
            t = ar.num(toll.mean_toll(n))
            t2 = ar.num(toll.second_toll(n))
            # mean from the marginal binomials; mu_n enters through k = n
            mu[n] = zero
            selfc = zero
            acc = t
            for m in range(r):
                acc += np.dot(marg[m], mu[: n + 1])
                selfc += marg[m][n]
            mu[n] = acc / (one - selfc)
            # F_1(n) is affine in s_n: evaluate at s_n = 0 and s_n = 1
            fill_column(n, mu[n], zero)
            f0 = F[0][n]
            fill_column(n, mu[n], one)
            f1 = F[0][n] - f0
            e1 = mu[n] - t
            s[n] = (f0 + 2 * t * e1 + t2) / (one - f1)
            fill_column(n, mu[n], s[n])
        return _table(mu, s, n_max, digits, label)


# ---------------------------------------------------------------------------
# dispatcher


def solve_statistic(stat: StatisticSpec, model: SplitModel, n_max: int,
                    digits: int = DEFAULT_DIGITS, work_budget: int = DEFAULT_WORK_BUDGET):
    """Exact moments for any supported (statistic, model) pair."""
    stat.check_model(model)
    kind = stat.kind
    init = (stat.init0, stat.init1)
    label = kind.value
    if kind is StatKind.LEADER:
        return solve_leader_election(n_max, digits)
    if kind is StatKind.IPL:
        return solve_internal_path_length(model, n_max, digits)
    if kind is StatKind.PATRICIA_EPL:
        return solve_patricia(model, toll_for(kind), n_max, digits, label)
    if kind in (StatKind.RADIX, StatKind.MULTIACCESS) or model.r > 2:
        return solve_multiway(model, toll_for(kind), init, n_max, digits, work_budget, label)
    return solve_trie(model, toll_for(kind, model.p), init, n_max, digits, label)


# ---------------------------------------------------------------------------
# Hadamard products of Poisson generating functions


def hadamard_product(a, b, z, n_terms: int, digits: int = DEFAULT_DIGITS):
    """e^{-z} sum_{n < n_terms} a_n b_n z^n / n! at real z >= 0.

    ``a`` and ``b`` are sequences or callables n -> value.
    """
    if z < 0:
        raise ValueError("z must be nonnegative")
    # Poisson(z) mass beyond n_terms must be negligible
    if n_terms < z + 12 * math.sqrt(z + 1) + digits * 2:
        raise ValueError(f"n_terms={n_terms} too small for z={z}; Poisson tail not negligible")
    fa = a if callable(a) else (lambda n: a[n])
    fb = b if callable(b) else (lambda n: b[n])
    with mpmath.workdps(digits + 15):
        z = mpmath.mpf(z)
        term = mpmath.exp(-z)
        acc = mpmath.mpf(0)
        for n in range(n_terms):
            acc += mpmath.mpmathify(fa(n)) * mpmath.mpmathify(fb(n)) * term
            term = term * z / (n + 1)
    return +acc
