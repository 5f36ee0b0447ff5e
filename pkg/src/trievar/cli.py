"""Command-line interface: exact tables, simulation, expansions, comparisons, identities."""
from __future__ import annotations

import argparse
import io
import os
import sys
from typing import Optional, Sequence

import mpmath
import numpy as np

from . import asymptotics as A
from .exact import WorkBudgetExceeded, to_mpf
from .model import ModelError, StatKind, StatisticSpec, make_model, parse_prob, symmetric_model
from .asymptotics.core import TruncationError

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_SEED = 0xC0FFEE
DIGITS_ENV = "TRIEVAR_DIGITS"
CSV_DIGITS = 17

SUPPORTED = {
    "size": "two-way, any p",
    "epl": "two-way, any p",
    "ipl": "exact/simulate any p; asympt variance p = 1/2",
    "peripheral": "exact/simulate any p; asympt variance p = 1/2",
    "radix": "--b B (symmetric B-way)",
    "leader": "p = 1/2",
    "multiaccess": "--probs or --b, any r >= 2",
    "patricia-epl": "exact/simulate any p; asympt variance p = 1/2",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV)
    if not raw:
        return 32
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{DIGITS_ENV} must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: str) -> list:
    """'256,1024' or '6..12' (a range of exponents is not implied: plain integers)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _model_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p", help="probability of a 0 bit, a number or expression such as '(sqrt(5)-1)/2'")
    g.add_argument("--probs", help="comma-separated r-way branch probabilities")
    g.add_argument("--b", type=int, help="symmetric b-way splits (radix sort, symmetric multiaccess)")
    g.add_argument("--rho", help="common root rho for p_m = rho^e_m (use with --exponents)")
    p.add_argument("--exponents", help="comma-separated exponents e_m for --rho")


def _stat_args(p, required=True):
    p.add_argument("--stat", required=required, choices=sorted(SUPPORTED), help="statistic")
    p.add_argument("--init0", type=float, default=None, help="X_0 (size/multiaccess only)")
    p.add_argument("--init1", type=float, default=None, help="X_1 (size/multiaccess only)")


def _common(p):
    p.add_argument("--digits", type=int, default=None, help=f"working precision (default ${DIGITS_ENV} or 32)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default stdout)")


def build_model(args):
    if args.exponents and not args.rho:
        raise UsageError("--exponents needs --rho")
    if args.rho:
        if not args.exponents:
            raise UsageError("--rho needs --exponents")
        rho = parse_prob(args.rho)
        exps = _int_list(args.exponents)
        probs = [float(rho ** e) for e in exps]
        return make_model(probs, {"rho": float(rho), "exponents": exps},
                          exact_probs=[f"({args.rho})**{e}" for e in exps])
    if args.b:
        return symmetric_model(args.b)
    if args.probs:
        parts = [s.strip() for s in args.probs.split(",")]
        return make_model([float(parse_prob(s)) for s in parts], exact_probs=parts)
    if args.p:
        p = float(parse_prob(args.p))
        if p == 0.5:
            return symmetric_model(2)
        return make_model([p, 1 - p], exact_probs=[args.p, f"1-({args.p})"])
    return symmetric_model(2)


def build_stat(args, model) -> StatisticSpec:
    kw = {}
    if args.stat == "radix":
        if model.r < 2 or not model.is_symmetric:
            raise UsageError("radix needs --b B")
        kw["b"] = model.r
    if args.init0 is not None:
        kw["init0"] = args.init0
    if args.init1 is not None:
        kw["init1"] = args.init1
    stat = StatisticSpec.of(args.stat, **kw)
    try:
        stat.check_model(model)
    except ModelError as e:
        pairs = "; ".join(f"{k}: {v}" for k, v in sorted(SUPPORTED.items()))
        raise UsageError(f"{e}\nsupported statistic/model pairs: {pairs}")
    return stat


def _fmt(x, digits=CSV_DIGITS) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return repr(x) if digits >= 17 else f"{x:.{digits}g}"
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(to_mpf(x), digits, min_fixed=-5, max_fixed=20)


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _asym_only_symmetric(stat, model):
    if stat.kind in (StatKind.IPL, StatKind.PERIPHERAL, StatKind.PATRICIA_EPL) and not (
            model.r == 2 and model.is_symmetric):
        raise UsageError(f"{stat.kind.value}: the closed form is available for the symmetric case only (p = 1/2)")


def cmd_exact(args, digits):
    from .serialize import to_json
    from .verify import exact_table
    model = build_model(args)
    stat = build_stat(args, model)
    tab = exact_table(stat, model, args.n_max, digits)
    if args.format == "json":
        return to_json(tab, digits)
    buf = io.StringIO()
    buf.write("n,mean,second_moment,variance,variance_over_n\n")
    with mpmath.workdps(digits + 5):
        for n in range(tab.n_max + 1):
            v = tab.mp("variance", n)
            vn = v / n if n else mpmath.mpf(0)
            buf.write(",".join([str(n), _fmt(tab.mp("mean", n)), _fmt(tab.mp("second", n)), _fmt(v), _fmt(vn)]) + "\n")
    return buf.getvalue()


def cmd_simulate(args, digits):
    from .montecarlo import simulate
    from .serialize import to_json
    model = build_model(args)
    stat = build_stat(args, model)
    res = simulate(stat, model, args.n, args.trials, args.seed)
    if args.format == "json":
        return to_json(res, digits)
    return ("n,trials,mean,variance,se_mean,se_var,seed\n"
            + ",".join([str(res.n), str(res.trials), repr(res.mean_hat), repr(res.var_hat),
                        repr(res.se_mean), repr(res.se_var), str(res.seed)]) + "\n")


def _expansion(args, stat, model, digits):
    if args.moment == "mean":
        return A.mean_expansion(stat, model, digits, args.k)
    _asym_only_symmetric(stat, model)
    return A.variance_expansion(stat, model, digits, args.k, args.j)


def cmd_asympt(args, digits):
    from .serialize import to_json
    model = build_model(args)
    stat = build_stat(args, model)
    exp = _expansion(args, stat, model, digits)
    if args.format == "json":
        return to_json(exp, digits)
    buf = io.StringIO()
    fs = {"const": exp.fourier, "log": exp.fourier_log, "log2": exp.fourier_log2}[args.level]
    amp = fs.amplitude() if fs is not None else 0
    buf.write(f"# statistic={stat.kind.value} moment={args.moment} model={model.describe()} "
              f"digits={digits} K={args.k} level={args.level}\n")
    buf.write(f"# c_n={_fmt(exp.c_n, digits)} c_log2={_fmt(exp.c_log2, digits)} c_log={_fmt(exp.c_log, digits)} "
              f"c_const={_fmt(exp.c_const, digits)} amplitude={_fmt(amp)} per_n={int(exp.per_n)}\n")
    buf.write("k,re,im\n")
    for k, c in exp.coefficient_rows(args.level):
        buf.write(f"{k},{_fmt(mpmath.re(c), digits)},{_fmt(mpmath.im(c), digits)}\n")
    return buf.getvalue()


def cmd_compare(args, digits):
    from .serialize import to_json
    from .verify import compare
    model = build_model(args)
    stat = build_stat(args, model)
    if args.moment == "variance":
        _asym_only_symmetric(stat, model)
    rep = compare(stat, model, _int_list(args.n), digits, args.k, moment=args.moment)
    if args.format == "json":
        text = to_json(rep, digits)
    else:
        buf = io.StringIO()
        buf.write("n,exact,predicted,gap\n")
        for r in rep.rows:
            buf.write(f"{r.n},{_fmt(r.exact)},{_fmt(r.predicted)},{_fmt(r.gap)}\n")
        text = buf.getvalue()
    breach = args.tol is not None and rep.rows[-1].gap > args.tol
    return text, (EXIT_TOLERANCE if breach else EXIT_OK)


def cmd_identities(args, digits):
    from .verify import identity_report, sinh_terms
    tol = mpmath.mpf(10) ** (-(digits - 6)) if args.tol is None else mpmath.mpf(args.tol)
    rows = identity_report(digits)
    buf = io.StringIO()
    buf.write("identity,residual,pass\n")
    bad = False
    for name, r in rows:
        ok = r < tol
        bad |= not ok
        buf.write(f"{name},{_fmt(r, 6)},{int(ok)}\n")
    for name, v in sinh_terms(digits).items():
        buf.write(f"# {name}={_fmt(v, 6)}\n")
    return buf.getvalue(), (EXIT_TOLERANCE if bad else EXIT_OK)


def cmd_table(args, digits):
    bs = _int_list(args.b)
    if any(b < 2 for b in bs):
        raise UsageError("bases must be >= 2")
    buf = io.StringIO()
    buf.write("b,constant\n")
    for b in bs:
        buf.write(f"{b},{_fmt(A.radix_variance_constant(b, digits), args.print_digits)}\n")
    return buf.getvalue()


def cmd_plot_data(args, digits):
    from .verify import exact_table
    model = build_model(args)
    stat = build_stat(args, model)
    if args.moment == "variance":
        _asym_only_symmetric(stat, model)
    exp = _expansion(args, stat, model, digits)
    grid = sorted({int(round(x)) for x in np.geomspace(args.n_min, args.n_max, args.points)})
    grid = [n for n in grid if n >= 2]
    tab = exact_table(stat, model, grid[-1], digits) if args.source == "exact" else None
    buf = io.StringIO()
    buf.write("n,exact,predicted,fluctuation\n" if tab is not None else "n,predicted,fluctuation\n")
    name = "variance" if args.moment == "variance" else "mean"
    for n in grid:
        pred = A.evaluate(exp, n, digits)
        fl = A.evaluate_fluctuation(exp, n).real
        if tab is not None:
            val = tab.mp(name, n) / (n if exp.per_n else 1)
            buf.write(f"{n},{_fmt(val)},{_fmt(pred)},{_fmt(fl)}\n")
        else:
            buf.write(f"{n},{_fmt(pred)},{_fmt(fl)}\n")
    return buf.getvalue()


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="trievar", description=__doc__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("exact", help="exact moment table for n = 0..N")
    _stat_args(p)
    _model_args(p)
    _common(p)
    p.add_argument("--n-max", type=int, required=True)

    p = sub.add_parser("simulate", help="Monte Carlo estimate at one n")
    _stat_args(p)
    _model_args(p)
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)

    for name, hlp in (("asympt", "asymptotic constants and Fourier coefficients"),
                      ("compare", "exact against asymptotic values on a ladder of n"),
                      ("plot-data", "exact and predicted values on a log-spaced grid")):
        p = sub.add_parser(name, help=hlp)
        _stat_args(p)
        _model_args(p)
        _common(p)
        p.add_argument("--moment", choices=("variance", "mean"), default="variance")
        p.add_argument("--k", type=int, default=A.DEFAULT_K, help="Fourier modes |k| <= K")
        p.add_argument("--j", type=int, default=None, help="cap on j-series terms")
        if name == "asympt":
            p.add_argument("--level", choices=("const", "log", "log2"), default="const")
        if name == "compare":
            p.add_argument("--n", default="256,1024,4096", help="comma list, e.g. 256,1024")
            p.add_argument("--tol", type=float, default=None, help="exit 2 if the last gap exceeds this")
        if name == "plot-data":
            p.add_argument("--n-min", type=int, default=16)
            p.add_argument("--n-max", type=int, default=1024)
            p.add_argument("--points", type=int, default=64)
            p.add_argument("--source", choices=("predicted", "exact"), default="predicted")

    p = sub.add_parser("identities", help="residuals of the analytic identities")
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out")

    p = sub.add_parser("table", help="radix sort variance constants")
    p.add_argument("--b", default="2..10", help="bases, e.g. 2..10 or 2,3,5")
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--print-digits", type=int, default=20)
    p.add_argument("--out")
    return ap


COMMANDS = {"exact": cmd_exact, "simulate": cmd_simulate, "asympt": cmd_asympt, "compare": cmd_compare,
            "identities": cmd_identities, "table": cmd_table, "plot-data": cmd_plot_data}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        digits = args.digits if args.digits is not None else _default_digits()
        if digits < 16:
            raise UsageError("--digits must be at least 16")
        res = COMMANDS[args.command](args, digits)
    except UsageError as e:
        print(f"trievar: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as e:
        print(f"trievar: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WorkBudgetExceeded as e:
        print(f"trievar: work budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except TruncationError as e:
        print(f"trievar: {e}", file=sys.stderr)
        return EXIT_TOLERANCE
    text, code = res if isinstance(res, tuple) else (res, EXIT_OK)
    _emit(text, getattr(args, "out", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
