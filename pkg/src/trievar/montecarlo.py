"""Monte Carlo estimates of trie statistics by recursive splitting of key counts.

A trie on n random strings is determined, in distribution, by the recursive
binomial (or multinomial) splits of the key count, so no strings are built.
Trials are simulated a batch at a time with all open nodes of one tree level
held in flat numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelError, SplitModel, StatKind, StatisticSpec, symmetric_model

__all__ = ["SimResult", "SimulationDepthError", "simulate", "sample", "BATCH"]

BATCH = 2000


class SimulationDepthError(RuntimeError):
    """A tree grew deeper than the safety cap of 64 log2(n) levels."""


@dataclass(frozen=True)
class SimResult:
    n: int
    trials: int
    mean_hat: float
    var_hat: float
    se_mean: float
    se_var: float
    seed: int

    def z_mean(self, exact_mean: float) -> float:
        return (self.mean_hat - exact_mean) / self.se_mean if self.se_mean > 0 else 0.0

    def z_var(self, exact_var: float) -> float:
        return (self.var_hat - exact_var) / self.se_var if self.se_var > 0 else 0.0


def _depth_cap(n: int) -> int:
    return max(64, int(64 * math.log2(max(n, 2))))


def _split(rng, cnt, probs):
    """Children counts for each parent, shape (len(cnt), r), via sequential binomials."""
    r = len(probs)
    out = np.empty((cnt.size, r), dtype=np.int64)
    left = cnt.copy()
    rest = 1.0
    for m in range(r - 1):
        pm = probs[m] / rest if rest > 0 else 1.0
        pm = min(max(pm, 0.0), 1.0)
        out[:, m] = rng.binomial(left, pm)
        left -= out[:, m]
        rest -= probs[m]
    out[:, r - 1] = left
    return out


def _tree_batch(rng, stat: StatisticSpec, probs, n: int, m: int) -> np.ndarray:
    kind = stat.kind
    acc = np.zeros(m, dtype=np.float64)
    tid = np.arange(m, dtype=np.int64)
    cnt = np.full(m, n, dtype=np.int64)
    depth = np.zeros(m, dtype=np.int64)
    cap = _depth_cap(n)
    patricia = kind is StatKind.PATRICIA_EPL
    r = len(probs)
    while tid.size:
        if int(depth.max()) > cap:
            raise SimulationDepthError(f"tree depth exceeded {cap} at n = {n}")
        small = cnt < 2
        if small.any():
            base = np.where(cnt[small] == 0, stat.init0, stat.init1)
            acc += np.bincount(tid[small], weights=base, minlength=m)
            keep = ~small
            tid, cnt, depth = tid[keep], cnt[keep], depth[keep]
            if not tid.size:
                break
        kids = _split(rng, cnt, probs)
        if patricia:
            # a unary node is skipped: redraw until the keys separate
            unary = (kids == cnt[:, None]).any(axis=1)
            while unary.any():
                kids[unary] = _split(rng, cnt[unary], probs)
                unary = (kids == cnt[:, None]).any(axis=1)
        if kind in (StatKind.SIZE, StatKind.MULTIACCESS):
            toll = np.ones(cnt.size)
        elif kind in (StatKind.EPL, StatKind.RADIX, StatKind.PATRICIA_EPL):
            toll = cnt.astype(np.float64)
        elif kind is StatKind.IPL:
            toll = depth.astype(np.float64)
        elif kind is StatKind.PERIPHERAL:
            lone = (kids[:, 0] == 1) | (kids[:, 0] == cnt - 1)
            toll = np.where(lone, np.where(cnt == 2, 2, cnt - 1), 0).astype(np.float64)
        else:
            raise ModelError(f"no tree simulation for {kind.value}")
        acc += np.bincount(tid, weights=toll, minlength=m)
        tid = np.repeat(tid, r)
        depth = np.repeat(depth + 1, r)
        cnt = kids.reshape(-1)
        live = cnt > 0 if stat.init0 == 0 else np.ones(cnt.size, dtype=bool)
        tid, cnt, depth = tid[live], cnt[live], depth[live]
    return acc


def _leader_batch(rng, n: int, m: int) -> np.ndarray:
    """Each round every remaining candidate flips a coin; heads survive unless
    nobody or everybody gets heads, in which case the round is repeated."""
    acc = np.zeros(m, dtype=np.float64)
    cnt = np.full(m, n, dtype=np.int64)
    rounds = 0
    cap = _depth_cap(n) * 64
    while True:
        live = cnt >= 2
        if not live.any():
            return acc
        rounds += 1
        if rounds > cap:
            raise SimulationDepthError("leader election did not terminate")
        c = cnt[live]
        acc[live] += c
        k = rng.binomial(c, 0.5)
        ok = (k >= 1) & (k <= c - 1)
        cnt[live] = np.where(ok, k, c)


def sample(statistic, model: SplitModel, n: int, trials: int, seed: int) -> np.ndarray:
    """Raw per-trial values of the statistic (length ``trials``)."""
    stat = statistic if isinstance(statistic, StatisticSpec) else StatisticSpec.of(statistic)
    if stat.kind is StatKind.RADIX and model is None:
        model = symmetric_model(stat.b)
    stat.check_model(model)
    if n < 0:
        raise ValueError("n must be non-negative")
    probs = [float(x) for x in model.probs]
    nbatch = -(-trials // BATCH)
    streams = np.random.SeedSequence(seed).spawn(nbatch)
    out = np.empty(trials, dtype=np.float64)
    for b, ss in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        lo = b * BATCH
        m = min(BATCH, trials - lo)
        if n == 0:
            out[lo:lo + m] = stat.init0
        elif n == 1:
            out[lo:lo + m] = stat.init1
        elif stat.kind is StatKind.LEADER:
            out[lo:lo + m] = _leader_batch(rng, n, m)
        else:
            out[lo:lo + m] = _tree_batch(rng, stat, probs, n, m)
    return out


def simulate(statistic, model: SplitModel, n: int, trials: int, seed: int) -> SimResult:
    """Mean and unbiased variance of the statistic over ``trials`` random tries.

    Standard errors: se_mean = sqrt(var/trials); se_var from the sample
    fourth central moment, sqrt((m4 - m2^2)/trials).
    """
    if trials < 2:
        raise ValueError("at least two trials are needed to estimate a variance")
    x = sample(statistic, model, n, trials, seed)
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev ** 2))
    m4 = float(np.mean(dev ** 4))
    var = m2 * trials / (trials - 1)
    se_mean = math.sqrt(var / trials)
    se_var = math.sqrt(max(m4 - m2 * m2, 0.0) / trials)
    return SimResult(n, trials, mean, var, se_mean, se_var, int(seed))
