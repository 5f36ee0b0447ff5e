"""JSON encoding of tables, simulation results, expansions and comparison reports.

Numbers are written as decimal strings at the artifact's working precision
so that parsing and re-encoding reproduces the same text.
"""
from __future__ import annotations

import json

import mpmath
import numpy as np

from .asymptotics import AsymptoticExpansion, FourierSeries
from .exact import MomentTable, to_mpf
from .montecarlo import SimResult
from .verify import ComparisonReport, ComparisonRow

__all__ = ["dec", "to_json", "from_json", "to_dict", "from_dict"]


def dec(x, digits: int) -> str:
    """Decimal string with ``digits`` significant digits."""
    if isinstance(x, float):
        return repr(float(x))
    if isinstance(x, mpmath.mpc):
        raise TypeError("complex values are written as separate re/im fields")
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(to_mpf(x), digits, strip_zeros=False, min_fixed=-5, max_fixed=20)


def _num(s: str, digits: int):
    with mpmath.workdps(digits + 10):
        return mpmath.mpf(s)


def _series_dict(fs: FourierSeries, digits):
    if fs is None:
        return None
    rows = [[k, dec(mpmath.re(c), digits), dec(mpmath.im(c), digits)] for k, c in sorted(fs.coeffs.items())]
    return {"mean": dec(mpmath.re(mpmath.mpmathify(fs.mean)), digits),
            "log_base": dec(fs.log_base, digits), "tail": dec(fs.tail, digits) if fs.tail != mpmath.inf else "inf",
            "coeffs": rows}


def _series_from(d, digits):
    if d is None:
        return None
    with mpmath.workdps(digits + 10):
        coeffs = {int(k): mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im)) for k, re, im in d["coeffs"]}
        tail = mpmath.inf if d["tail"] == "inf" else mpmath.mpf(d["tail"])
        return FourierSeries(coeffs, mpmath.mpf(d["mean"]), mpmath.mpf(d["log_base"]), tail)


def to_dict(obj, digits: int = 32) -> dict:
    if isinstance(obj, MomentTable):
        return {"type": "MomentTable", "n_max": obj.n_max, "digits": obj.digits, "label": obj.label,
                "mean": [dec(x, digits) for x in obj.mean],
                "second": [dec(x, digits) for x in obj.second],
                "variance": [dec(x, digits) for x in obj.variance]}
    if isinstance(obj, SimResult):
        return {"type": "SimResult", "n": obj.n, "trials": obj.trials, "seed": obj.seed,
                "mean_hat": repr(obj.mean_hat), "var_hat": repr(obj.var_hat),
                "se_mean": repr(obj.se_mean), "se_var": repr(obj.se_var)}
    if isinstance(obj, AsymptoticExpansion):
        return {"type": "AsymptoticExpansion", "label": obj.label, "per_n": obj.per_n, "digits": digits,
                "h": dec(obj.h, digits), "c_n": dec(obj.c_n, digits), "c_log2": dec(obj.c_log2, digits),
                "c_log": dec(obj.c_log, digits), "c_const": dec(obj.c_const, digits),
                "fourier": _series_dict(obj.fourier, digits),
                "fourier_log": _series_dict(obj.fourier_log, digits),
                "fourier_log2": _series_dict(obj.fourier_log2, digits)}
    if isinstance(obj, ComparisonReport):
        return {"type": "ComparisonReport", "statistic": obj.statistic, "model": obj.model,
                "quantity": obj.quantity, "digits": digits, "converging": obj.converging,
                "rows": [{"n": r.n, "exact": dec(r.exact, digits), "predicted": dec(r.predicted, digits),
                          "gap": dec(r.gap, digits)} for r in obj.rows]}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def from_dict(d: dict):
    kind = d.get("type")
    if kind == "MomentTable":
        dg = d["digits"]

        def arr(key):
            if dg <= 15:
                return np.array([float(s) for s in d[key]], dtype=np.float64)
            return np.array([_num(s, dg) for s in d[key]], dtype=object)

        return MomentTable(d["n_max"], arr("mean"), arr("second"), arr("variance"), dg, d["label"])
    if kind == "SimResult":
        return SimResult(d["n"], d["trials"], float(d["mean_hat"]), float(d["var_hat"]),
                         float(d["se_mean"]), float(d["se_var"]), d["seed"])
    if kind == "AsymptoticExpansion":
        dg = d["digits"]
        return AsymptoticExpansion(
            h=_num(d["h"], dg), c_const=_num(d["c_const"], dg), c_log=_num(d["c_log"], dg),
            c_log2=_num(d["c_log2"], dg), c_n=_num(d["c_n"], dg),
            fourier=_series_from(d["fourier"], dg), fourier_log=_series_from(d["fourier_log"], dg),
            fourier_log2=_series_from(d["fourier_log2"], dg), per_n=d["per_n"], label=d["label"],
            meta={"digits": dg})
    if kind == "ComparisonReport":
        dg = d["digits"]
        rep = ComparisonReport(d["statistic"], d["model"], d["quantity"])
        rep.rows = [ComparisonRow(r["n"], _num(r["exact"], dg), _num(r["predicted"], dg), _num(r["gap"], dg))
                    for r in d["rows"]]
        return rep
    raise ValueError(f"unknown artifact type {kind!r}")


def to_json(obj, digits: int = 32) -> str:
    return json.dumps(to_dict(obj, digits), indent=1, sort_keys=True) + "\n"


def from_json(text: str):
    return from_dict(json.loads(text))
