"""Command-line front end: check, audit, falsify, scan."""

from __future__ import annotations

import argparse
import ast
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import __version__, checkers, core, poisson, semigroup
from .audit import AUDIT_IDS, run_audit
from .errors import DomainError, FunkineqError
from .functions import FAMILY_NAMES, Function1D, default_suite, make_family, quadratic
from .reports import FIELDS, InequalityReport

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

INEQUALITY_IDS = ("bg", "ir", "ir-sqrt", "exp-hardy", "beta-hardy", "cmp", "bg-local", "cmp-lf",
                  "mlsi-p", "poisson", "poisson-thm51", "hs-transfer", "contraction-1d", "median")
DISCRETE_IDS = ("poisson", "poisson-thm51")

# checker parameters with their defaults; None means "not used by this id"
CHECK_PARAMS = {
    "alpha": 1.0, "c": 0.5, "beta": 1.5, "kappa": None, "t": 1.0, "x": 0.0, "rho": 1.0,
    "p": 1.5, "lam": 1.0, "base": "ir", "h_amp": 0.5, "v": 0.5,
}
# family parameters accepted on the command line
FAMILY_PARAMS = ("a", "N", "s", "eps", "value")
MLSI_C_DEFAULT = 1.0
_FAMILY_KEY = {"value": "c"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# H-expression grammar: t, e, pi, numbers, + - * /, unary minus, log(.), pow(., .)

_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply, ast.Div: np.divide}
_CALLS = {"log": (1, np.log), "pow": (2, np.power)}
_NAMES = {"e": math.e, "pi": math.pi}


def parse_h(expr: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile an H expression in the tiny grammar to a vectorized callable of t."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse H expression {expr!r}: {exc.msg}") from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            v = float(node.value)
            return lambda t: v
        if isinstance(node, ast.Name):
            if node.id == "t":
                return lambda t: t
            if node.id in _NAMES:
                v = _NAMES[node.id]
                return lambda t: v
            raise UsageError(f"unknown name {node.id!r} in H expression")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            return (lambda t: -inner(t)) if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op, l, r = _BINOPS[type(node.op)], build(node.left), build(node.right)
            return lambda t: op(l(t), r(t))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            if node.func.id not in _CALLS:
                raise UsageError(f"unknown function {node.func.id!r} in H expression")
            arity, fn = _CALLS[node.func.id]
            if len(node.args) != arity:
                raise UsageError(f"{node.func.id} takes {arity} argument(s)")
            args = [build(a) for a in node.args]
            return lambda t: fn(*(a(t) for a in args))
        raise UsageError(f"unsupported syntax in H expression: {ast.dump(node)[:40]}")

    compiled = build(tree)

    def H(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return np.broadcast_to(np.asarray(compiled(t), dtype=float), t.shape).copy()

    return H


# ---------------------------------------------------------------------------
# dispatch

def _family_kwargs(fp: dict) -> dict:
    return {_FAMILY_KEY.get(k, k): v for k, v in fp.items() if v is not None}


def build_functions(family: str | None, fp: dict) -> list[Function1D]:
    if family is None:
        if any(v is not None for v in fp.values()):
            raise UsageError("family parameters need --family")
        return default_suite()
    try:
        return [make_family(family, **_family_kwargs(fp))]
    except TypeError as exc:
        raise UsageError(f"bad parameters for family {family!r}: {exc}") from None


def _discrete(f: Function1D, K: int = 200) -> poisson.DiscreteFunction:
    return poisson.DiscreteFunction.from_callable(f.f, K, "linear", tag=f.tag)


def run_one(ineq: str, f: Function1D, cp: dict) -> InequalityReport:
    """Run one registered checker on one function with checker params cp."""
    if ineq == "bg":
        return checkers.check_bg(f, cp["alpha"], cp["c"])
    if ineq == "ir":
        return checkers.check_ir(f)
    if ineq == "ir-sqrt":
        return checkers.check_ir_sqrt(f)
    if ineq == "exp-hardy":
        return checkers.check_exp_hardy(f)
    if ineq == "beta-hardy":
        return checkers.check_beta_hardy(f, cp["beta"])
    if ineq == "cmp":
        return checkers.check_cmp(f, cp["beta"], cp["kappa"])
    if ineq == "bg-local":
        return semigroup.theorem_bg_check(f, cp["t"], cp["alpha"], cp["x"], cp["rho"])
    if ineq == "cmp-lf":
        return semigroup.cmp_lf_check(f, cp["alpha"], cp["c"])
    if ineq == "mlsi-p":
        return semigroup.modified_lsi_conclusion_check(cp["p"], f, cp["alpha"], cp["c"])
    if ineq == "poisson":
        return poisson.poisson_exponential_check(cp["lam"], _discrete(f))
    if ineq == "poisson-thm51":
        return poisson.theorem_51_check(poisson.ChainSpec(cp["lam"]), _discrete(f), cp["alpha"],
                                        cp["c_lsi"])
    if ineq == "hs-transfer":
        amp = cp["h_amp"]
        if not 0 <= amp < 1:
            raise DomainError("h-amp must lie in [0, 1)")
        h = Function1D(lambda x: 1 + amp * np.cos(x), lambda x: -amp * np.sin(x),
                       tag=f"1+{amp:g}cos")
        return checkers.holley_stroock_transfer(cp["base"], h, f)
    if ineq == "contraction-1d":
        if not cp["v"] > 0:
            raise DomainError("v must be positive")
        mu = core.MeasureSpec.logconcave(quadratic(cp["v"]))
        return checkers.contraction_transfer_1d(mu, f, cp["base"])
    if ineq == "median":
        return checkers.median_variant_check(f)
    raise UsageError(f"unknown inequality {ineq!r}")


def _thm51_alpha(cp: dict) -> None:
    # the discrete statement needs alpha > c_lsi (default lambda); default to twice that
    if cp["alpha"] is None:
        lam = cp["lam"] if cp["lam"] is not None else CHECK_PARAMS["lam"]
        cp["alpha"] = 2 * (cp["c_lsi"] if cp["c_lsi"] is not None else lam)


def _mlsi_defaults(cp: dict) -> None:
    # conditional check: assume c = 1 (the p = 2 value in this normalization), alpha = 2c
    if cp["c"] is None:
        cp["c"] = MLSI_C_DEFAULT
    if cp["alpha"] is None:
        cp["alpha"] = 2 * cp["c"]


def _special_defaults(ineq: str, cp: dict) -> None:
    if ineq == "poisson-thm51":
        _thm51_alpha(cp)
    elif ineq == "mlsi-p":
        _mlsi_defaults(cp)


def _check_params(args) -> dict:
    cp = {k: getattr(args, k) for k in CHECK_PARAMS}
    cp["c_lsi"] = args.c_lsi
    _special_defaults(args.inequality, cp)
    for k, v in CHECK_PARAMS.items():
        if cp[k] is None:
            cp[k] = v
    return cp


def _used_params(ineq: str, cp: dict) -> dict:
    used = {
        "bg": ("alpha", "c"), "beta-hardy": ("beta",), "cmp": ("beta", "kappa"),
        "bg-local": ("t", "alpha", "x", "rho"), "cmp-lf": ("alpha", "c"),
        "mlsi-p": ("p", "alpha", "c"), "poisson": ("lam",),
        "poisson-thm51": ("lam", "alpha", "c_lsi"), "hs-transfer": ("base", "h_amp"),
        "contraction-1d": ("base", "v"),
    }.get(ineq, ())
    return {k: cp[k] for k in used if cp[k] is not None}


# ---------------------------------------------------------------------------
# output

def manifest(command: str, params: dict, reports: list[dict]) -> dict:
    return {"schema": SCHEMA, "command": command, "params": params, "reports": reports,
            "tool_version": __version__, "quadrature": core.default_config().as_dict()}


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def _cell(v) -> str:
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True, allow_nan=False)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_csv(rows: list[dict], lead: Sequence[str] = (), fields: Sequence[str] = FIELDS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*lead, *fields])
    for r in rows:
        w.writerow([_cell(r.get(k, "")) for k in (*lead, *fields)])
    return buf.getvalue()


def _text_report(r: InequalityReport) -> str:
    status = "vacuous" if r.vacuous else ("pass" if r.satisfied else "FAIL")
    return (f"{status:7s} {r.inequality_id:14s} {r.function_tag:28s} "
            f"lhs={r.lhs:.10g} rhs={r.rhs:.10g} margin={r.margin:.6g}")


def _emit(args, command: str, params: dict, dicts: list[dict], text_lines: list[str],
          csv_fields: Sequence[str] = FIELDS, lead: Sequence[str] = ()) -> None:
    if getattr(args, "json", False):
        print(dump_json(manifest(command, params, dicts)))
    elif getattr(args, "csv", False):
        sys.stdout.write(reports_csv(dicts, lead, csv_fields))
    else:
        print("\n".join(text_lines))


# ---------------------------------------------------------------------------
# commands

def cmd_check(args) -> int:
    cp = _check_params(args)
    fp = {k: getattr(args, k) for k in FAMILY_PARAMS}
    fns = build_functions(args.family, fp)
    reports = [run_one(args.inequality, f, cp) for f in fns]
    params = {"inequality": args.inequality, "family": args.family or "default-suite",
              **_family_kwargs(fp), **_used_params(args.inequality, cp)}
    _emit(args, "check", params, [r.to_dict() for r in reports], [_text_report(r) for r in reports])
    failed = [r for r in reports if not (r.satisfied or r.vacuous)]
    if failed and (args.json or args.csv):
        for r in failed:
            print(_text_report(r), file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


_AUDIT_FIELDS = ("id", "claimed", "computed", "tolerance", "pass")


def cmd_audit(args) -> int:
    ids = None if args.all or not args.id else args.id
    try:
        rep = run_audit(ids)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    rows = [it.to_dict() for it in rep.items]
    lines = [f"{'pass' if r['pass'] else 'FAIL':4s} {r['id']:14s} {r['computed']:.10g}  {r['claimed']}"
             for r in rows]
    _emit(args, "audit", {"ids": list(ids or AUDIT_IDS)}, rows, lines, _AUDIT_FIELDS)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _n_list(n_max: float) -> list[float]:
    if not n_max >= 4:
        raise UsageError("--N-max must be at least 4")
    ns, n = [], 2.0
    while n <= n_max * (1 + 1e-12):
        ns.append(n)
        n *= 2
    return ns


def cmd_falsify(args) -> int:
    H = parse_h(args.H)
    probe = H(np.linspace(0.0, 10.0, 11))
    if not np.all(np.isfinite(probe)):
        raise UsageError("H must be finite on [0, inf)")
    rep = checkers.falsify_h(H, _n_list(args.N_max), label=args.H)
    d = rep.to_dict()
    lines = [f"{'N':>6s} {'lhs':>12s} {'rhs':>12s} {'lhs-rhs':>12s} lower upper"]
    for i, N in enumerate(rep.N):
        lines.append(f"{N:6g} {rep.lhs[i]:12.6f} {rep.rhs[i]:12.6f} {rep.difference[i]:12.6f} "
                     f"{'ok' if rep.lower_bound_ok[i] else 'BAD':5s} "
                     f"{'ok' if rep.upper_bound_ok[i] else 'BAD'}")
    lines.append(f"strictly increasing: {rep.strictly_increasing}; increment ratio "
                 f"{rep.increment_ratio:.4f}; divergent: {rep.divergent}")
    if args.json:
        print(dump_json(manifest("falsify", {"H": args.H, "N_max": args.N_max}, [d])))
    elif args.csv:
        rows = [{"N": N, "lhs": rep.lhs[i], "rhs": rep.rhs[i], "difference": rep.difference[i],
                 "lower_bound_ok": rep.lower_bound_ok[i], "upper_bound_ok": rep.upper_bound_ok[i]}
                for i, N in enumerate(rep.N)]
        sys.stdout.write(reports_csv(rows, (), tuple(rows[0])))
    else:
        print("\n".join(lines))
    ok = all(rep.lower_bound_ok) and all(rep.upper_bound_ok)
    return EXIT_OK if ok else EXIT_FAIL


def parse_range(spec: str) -> list[float]:
    """'lo:hi:step' (inclusive) or a single number."""
    parts = spec.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad grid {spec!r}; use lo:hi:step or a number") from None
    if len(vals) == 1:
        return vals
    if len(vals) != 3 or not vals[2] > 0 or vals[1] < vals[0]:
        raise UsageError(f"bad grid {spec!r}; need lo <= hi and step > 0")
    lo, hi, step = vals
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def cmd_scan(args) -> int:
    numeric = [k for k, v in CHECK_PARAMS.items() if k != "base"] + list(FAMILY_PARAMS)
    grids = {}
    for k in numeric:
        raw = getattr(args, k)
        if raw is not None:
            grids[k] = parse_range(raw)
    names = list(grids)
    points = [dict(zip(names, combo)) for combo in itertools.product(*(grids[k] for k in names))]
    if args.family is None and any(k in FAMILY_PARAMS for k in names):
        raise UsageError("family parameters need --family")

    def task(pt: dict) -> InequalityReport:
        cp = dict.fromkeys(CHECK_PARAMS)
        cp["c_lsi"] = args.c_lsi
        cp["base"] = args.base or "ir"
        cp.update({k: v for k, v in pt.items() if k in CHECK_PARAMS})
        _special_defaults(args.inequality, cp)
        cp.update({k: v for k, v in CHECK_PARAMS.items() if cp[k] is None})
        fp = {k: v for k, v in pt.items() if k in FAMILY_PARAMS}
        fns = build_functions(args.family, fp) if args.family else default_suite()
        return [run_one(args.inequality, f, cp) for f in fns]

    workers = args.workers or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(task, points))
    rows, reps = [], []
    for pt, rs in zip(points, results):
        for r in rs:
            rows.append({**pt, **r.to_dict()})
            reps.append(r)
    params = {"inequality": args.inequality, "family": args.family or "default-suite",
              "grid": {k: grids[k] for k in names}}
    if args.json:
        print(dump_json(manifest("scan", params, rows)))
    else:
        sys.stdout.write(reports_csv(rows, names))
    return EXIT_OK if all(r.satisfied or r.vacuous for r in reps) else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser

def _add_output(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="emit a versioned JSON manifest")
    g.add_argument("--csv", action="store_true", help="emit CSV, one row per report")


def _add_family(p, kind=float):
    p.add_argument("--family", choices=FAMILY_NAMES, help="test function family (default: suite)")
    p.add_argument("--a", type=kind, help="family scale a")
    p.add_argument("--N", type=kind, help="cap N for quadratic-capped")
    p.add_argument("--s", type=kind, help="scale s for cubic-ratio")
    p.add_argument("--eps", type=kind, help="smoothing eps for abs-smoothed")
    p.add_argument("--value", type=kind, help="value of the constant family")


def _add_checker_params(p, kind=float):
    p.add_argument("--alpha", type=kind)
    p.add_argument("--c", type=kind, help="log-Sobolev constant c (default 0.5)")
    p.add_argument("--beta", type=kind)
    p.add_argument("--kappa", type=kind)
    p.add_argument("--t", type=kind, help="semigroup time")
    p.add_argument("--x", type=kind, help="evaluation point for bg-local")
    p.add_argument("--rho", type=kind, help="curvature")
    p.add_argument("--p", type=kind, help="exponent of the measure exp(-|x|^p)")
    p.add_argument("--lam", type=kind, help="Poisson parameter")
    p.add_argument("--c-lsi", dest="c_lsi", type=float, help="assumed discrete LSI constant")
    p.add_argument("--base", choices=("ir", "ir-sqrt", "bg"), help="base inequality for transfers")
    p.add_argument("--h-amp", dest="h_amp", type=kind, help="amplitude of h = 1 + amp cos x")
    p.add_argument("--v", type=kind, help="V(x) = v x^2 for contraction-1d")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="funkineq",
                                 description="Numerical checks of exponential integrability inequalities.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run one registered inequality checker")
    p.add_argument("inequality", choices=INEQUALITY_IDS)
    _add_family(p)
    _add_checker_params(p)
    _add_output(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("audit", help="recompute the table of explicit constants")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true")
    g.add_argument("--id", action="append", help=f"one of: {', '.join(AUDIT_IDS)}")
    _add_output(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("falsify", help="run the capped quadratic family against a weight H")
    p.add_argument("--H", required=True, help="expression in t using + - * /, log, pow, e, pi")
    p.add_argument("--N-max", dest="N_max", type=float, default=64.0)
    _add_output(p)
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("scan", help="sweep a parameter grid and print margins as CSV")
    p.add_argument("--inequality", required=True, choices=INEQUALITY_IDS)
    p.add_argument("--workers", type=int)
    p.add_argument("--json", action="store_true")
    _add_family(p, str)
    _add_checker_params(p, str)
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FunkineqError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
