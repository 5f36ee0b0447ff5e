"""Splitting models, statistic descriptions and toll laws.

A :class:`SplitModel` carries the branching probabilities of one node of the
splitting process together with its entropy and its periodicity class.  The
periodicity class decides whether the asymptotic expansions carry a genuine
Fourier series (``Rational``) or collapse to constants (``Irrational``).
"""
from __future__ import annotations

import ast
import enum
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath

__all__ = [
    "Rational",
    "Irrational",
    "SplitModel",
    "StatKind",
    "StatisticSpec",
    "TollSpec",
    "make_model",
    "symmetric_model",
    "golden_model",
    "detect_periodicity",
    "chi",
    "split_weight",
    "patricia_weight",
    "toll_for",
    "parse_prob",
    "ModelError",
]

DEFAULT_MAX_DEN = 200
DEFAULT_TOL = 1e-12


class ModelError(ValueError):
    """Invalid splitting model, statistic or model/statistic combination."""


@dataclass(frozen=True)
class Rational:
    """All branch probabilities are integer powers of a common ``rho``.

    For two-way models ``log p / log q = r_num / l_den`` in lowest terms, with
    ``p = rho**r_num`` up to the common root, so that the Fourier modes are
    ``chi_k = 2 r_num k pi i / log p``.
    """

    rho: float
    exponents: tuple[int, ...]
    r_num: int = 1
    l_den: int = 1


@dataclass(frozen=True)
class Irrational:
    """No common root at the requested tolerance; expansions are aperiodic."""


@dataclass(frozen=True)
class SplitModel:
    probs: tuple[float, ...]
    entropy: float
    periodicity: Rational | Irrational
    # exact values used by high precision code when known (e.g. p = 1/2)
    exact_probs: Optional[tuple[str, ...]] = field(default=None, compare=False)

    @property
    def r(self) -> int:
        return len(self.probs)

    @property
    def p(self) -> float:
        return self.probs[0]

    @property
    def q(self) -> float:
        return self.probs[1] if self.r == 2 else 1.0 - self.probs[0]

    @property
    def is_rational(self) -> bool:
        return isinstance(self.periodicity, Rational)

    @property
    def is_symmetric(self) -> bool:
        return all(abs(pm - 1.0 / self.r) < 1e-15 for pm in self.probs)

    def mp_probs(self) -> list:
        """Branch probabilities as mpmath numbers at the current precision."""
        if self.exact_probs is not None:
            return [parse_prob(s) for s in self.exact_probs]
        return [mpmath.mpf(x) for x in self.probs]

    def mp_entropy(self):
        return -mpmath.fsum(pm * mpmath.log(pm) for pm in self.mp_probs())

    def describe(self) -> str:
        ps = ", ".join(f"{x:.12g}" for x in self.probs)
        if self.is_rational:
            per = self.periodicity
            cls = f"rational(rho={per.rho:.12g}, r={per.r_num}, l={per.l_den})"
        else:
            cls = "irrational"
        return f"probs=[{ps}] h={self.entropy:.15g} {cls}"


class StatKind(str, enum.Enum):
    SIZE = "size"
    EPL = "epl"
    IPL = "ipl"
    PERIPHERAL = "peripheral"
    RADIX = "radix"
    LEADER = "leader"
    MULTIACCESS = "multiaccess"
    PATRICIA_EPL = "patricia-epl"


@dataclass(frozen=True)
class StatisticSpec:
    kind: StatKind
    b: int = 2
    init0: float = 0.0
    init1: float = 0.0

    def __post_init__(self):
        kind = StatKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is StatKind.RADIX and self.b < 2:
            raise ModelError("radix sort needs b >= 2 buckets")
        if kind is StatKind.PATRICIA_EPL and (self.init0 or self.init1):
            raise ModelError("PATRICIA statistics use X0 = X1 = 0")

    @classmethod
    def of(cls, kind, **kw) -> "StatisticSpec":
        kind = StatKind(kind)
        if kind is StatKind.PERIPHERAL and "init1" not in kw:
            kw["init1"] = 1.0
        return cls(kind, **kw)

    def check_model(self, model: SplitModel) -> None:
        if self.kind is StatKind.RADIX:
            if model.r != self.b or not model.is_symmetric:
                raise ModelError(f"radix sort with b={self.b} needs the symmetric {self.b}-way model")
        elif self.kind is StatKind.LEADER:
            if model.r != 2 or not model.is_symmetric:
                raise ModelError("leader election needs the symmetric two-way model p = 1/2")
        elif self.kind is not StatKind.MULTIACCESS and model.r != 2:
            raise ModelError(f"{self.kind.value} is defined for two-way splits only")


@dataclass(frozen=True)
class TollSpec:
    """Law of the toll ``T_n`` through its first two moments.

    ``conditional(n, k)`` gives ``E(T_n | I_n = k)`` for tolls that depend on
    the split (then ``T_n`` is a deterministic function of the split and the
    second moment is derived from it).
    """

    mean_toll: Callable[[int], float]
    second_toll: Callable[[int], float]
    conditional: Optional[Callable[[int, int], float]] = None


def _const_toll(c: float) -> TollSpec:
    return TollSpec(lambda n: c if n >= 2 else 0, lambda n: c * c if n >= 2 else 0)


def _peripheral_conditional(n: int, k: int) -> int:
    if n < 2:
        return 0
    if k == 1 or k == n - 1:
        return 2 if n == 2 else n - 1
    return 0


SIZE_TOLL = _const_toll(1)
EPL_TOLL = TollSpec(lambda n: n if n >= 2 else 0, lambda n: n * n if n >= 2 else 0)


def peripheral_toll(p: float = 0.5) -> TollSpec:
    """Toll n-1 (2 when n = 2) charged only when one key splits off alone."""

    def moment(n: int, power: int) -> float:
        if n < 2:
            return 0.0
        ks = {1, n - 1}
        return math.fsum(split_weight(n, k, p) * _peripheral_conditional(n, k) ** power for k in ks)

    return TollSpec(lambda n: moment(n, 1), lambda n: moment(n, 2),
                    conditional=_peripheral_conditional)


def toll_for(kind, p: float = 0.5) -> TollSpec:
    kind = StatKind(kind)
    if kind in (StatKind.SIZE, StatKind.MULTIACCESS):
        return SIZE_TOLL
    if kind in (StatKind.EPL, StatKind.RADIX, StatKind.PATRICIA_EPL):
        return EPL_TOLL
    if kind is StatKind.PERIPHERAL:
        return peripheral_toll(p)
    raise ModelError(f"{kind.value} is not a toll-driven trie statistic")


# ---------------------------------------------------------------------------
# periodicity


def detect_periodicity(probs: Sequence[float], max_den: int = DEFAULT_MAX_DEN,
                       tol: float = DEFAULT_TOL) -> Rational | Irrational:
    """Classify a two-way model by searching rationals ``r/l`` with ``l <= max_den``.

    The smallest denominator within ``tol`` of ``log p / log q`` wins.
    """
    if len(probs) != 2:
        raise ModelError("periodicity detection is limited to r = 2; pass a rationality hint")
    p, q = probs
    ratio = math.log(p) / math.log(q)
    for den in range(1, max_den + 1):
        num = round(ratio * den)
        if num < 1:
            continue
        if math.gcd(num, den) != 1:
            continue
        if abs(ratio - num / den) < tol:
            return _rational_from_ratio(p, q, num, den)
    return Irrational()


def _rational_from_ratio(p: float, q: float, num: int, den: int) -> Rational:
    # log p / log q = num/den  =>  p = rho**num, q = rho**den with rho = p**(1/num)
    rho = p ** (1.0 / num)
    return Rational(rho=rho, exponents=(num, den), r_num=num, l_den=den)


def make_model(probs: Sequence[float], rationality_hint: Optional[dict] = None,
               tol: float = DEFAULT_TOL, max_den: int = DEFAULT_MAX_DEN,
               exact_probs: Optional[Sequence[str]] = None) -> SplitModel:
    probs = tuple(float(x) for x in probs)
    if len(probs) < 2:
        raise ModelError("need at least two branches")
    if any(not (0.0 < x < 1.0) for x in probs):
        raise ModelError(f"branch probabilities must lie in (0,1): {probs}")
    if abs(math.fsum(probs) - 1.0) > 1e-12:
        raise ModelError(f"branch probabilities must sum to 1: {probs}")
    h = -math.fsum(x * math.log(x) for x in probs)

    if rationality_hint is not None:
        rho = float(rationality_hint["rho"])
        exps = tuple(int(e) for e in rationality_hint["exponents"])
        if len(exps) != len(probs) or min(exps) < 1:
            raise ModelError("hint needs one positive exponent per branch")
        for pm, em in zip(probs, exps):
            if abs(pm - rho ** em) > max(tol, 1e-15):
                raise ModelError(f"hint inconsistent with probabilities: {pm} != {rho}**{em}")
        g = 0
        for em in exps:
            g = math.gcd(g, em)
        if g > 1:
            exps = tuple(e // g for e in exps)
            rho = rho ** g
        if len(probs) == 2:
            per = Rational(rho, exps, exps[0], exps[1])
        else:
            per = Rational(rho, exps)
    elif len(probs) == 2:
        per = detect_periodicity(probs, max_den=max_den, tol=tol)
    elif all(abs(x - 1.0 / len(probs)) < 1e-15 for x in probs):
        per = Rational(1.0 / len(probs), (1,) * len(probs))
    else:
        per = Irrational()
    return SplitModel(probs, h, per, tuple(exact_probs) if exact_probs else None)


def symmetric_model(r: int = 2) -> SplitModel:
    return make_model([1.0 / r] * r, {"rho": 1.0 / r, "exponents": [1] * r},
                      exact_probs=[f"1/{r}"] * r)


def golden_model() -> SplitModel:
    """The rational asymmetric model ``q = p**2``, ``p = (sqrt 5 - 1)/2``."""
    p = (math.sqrt(5.0) - 1.0) / 2.0
    return make_model([p, 1.0 - p], {"rho": p, "exponents": [1, 2]},
                      exact_probs=["(sqrt(5)-1)/2", "(3-sqrt(5))/2"])


def chi(model: SplitModel, k: int):
    """Imaginary pole spacing ``chi_k`` of the Fourier mode ``k`` (an mpc).

    For two-way rational models ``chi_k = 2 r k pi i / log p``; for r-way models
    with common root ``rho``, ``chi_k = 2 k pi i / log rho``.
    """
    per = model.periodicity
    if not isinstance(per, Rational):
        raise ModelError("chi_k only exists for rational (periodic) models")
    if k == 0:
        return mpmath.mpc(0)
    if model.r == 2:
        p = model.mp_probs()[0]
        return mpmath.mpc(0, 2 * per.r_num * k * mpmath.pi / mpmath.log(p))
    rho = _mp_rho(model)
    return mpmath.mpc(0, 2 * k * mpmath.pi / mpmath.log(rho))


def _mp_rho(model: SplitModel):
    per = model.periodicity
    pm = model.mp_probs()[0]
    return pm ** (mpmath.mpf(1) / per.exponents[0])


def mp_log_base(model: SplitModel):
    """``log(1/rho_eff)`` where the Fourier variable is ``log n / log(1/rho_eff)``."""
    per = model.periodicity
    if model.r == 2:
        p = model.mp_probs()[0]
        return -mpmath.log(p) / per.r_num
    return -mpmath.log(_mp_rho(model))


# ---------------------------------------------------------------------------
# splitting weights


def split_weight(n: int, k: int, p: float) -> float:
    """Binomial split probability ``C(n,k) p^k q^(n-k)`` evaluated in log space."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    q = 1.0 - p
    if k == 0:
        return q ** n
    if k == n:
        return p ** n
    lw = (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
          + k * math.log(p) + (n - k) * math.log(q))
    return math.exp(lw)


def patricia_weight(n: int, k: int, p: float) -> float:
    if n < 2 or not 1 <= k <= n - 1:
        raise ValueError(f"PATRICIA splits need n >= 2 and 1 <= k <= n-1, got n={n} k={k}")
    q = 1.0 - p
    return split_weight(n, k, p) / (1.0 - p ** n - q ** n)


def split_row(n: int, p: float) -> list[float]:
    """Row ``pi_{n,0..n}`` via the ratio recurrence started in log space."""
    q = 1.0 - p
    row = [0.0] * (n + 1)
    # start at the mode to keep the ratio recurrence away from underflow
    m = min(n, max(0, int(round(n * p))))
    row[m] = split_weight(n, m, p)
    ratio = p / q
    for k in range(m, n):
        row[k + 1] = row[k] * (n - k) / (k + 1) * ratio
    for k in range(m, 0, -1):
        row[k - 1] = row[k] * k / (n - k + 1) / ratio
    return row


def exact_fraction_weight(n: int, k: int, p: Fraction) -> Fraction:
    return math.comb(n, k) * p ** k * (1 - p) ** (n - k)


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sqrt": mpmath.sqrt, "log": mpmath.log, "exp": mpmath.exp}


def parse_prob(expr: str):
    """Evaluate an arithmetic probability expression like ``(sqrt(5)-1)/2`` in mpmath."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return mpmath.mpf(node.value) if isinstance(node.value, int) else mpmath.mpf(repr(node.value))
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ModelError(f"unsupported probability expression: {expr!r}")

    return ev(ast.parse(expr, mode="eval"))
