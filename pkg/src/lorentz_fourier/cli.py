"""Command-line front end.

Exit status: 0 when the computation finished, 2 when the verdict is
"infinite" or a checked condition fails, 1 on usage errors.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import conditions, fourier, norms
from .averaging import AveragingOp
from .cones import ConeParams, ratio_supremum_bounds
from .level import level_function
from .stepfn import StepFunction
from .weights import Weight, WeightSyntaxError, parse_weight

EXIT_OK, EXIT_USAGE, EXIT_VERDICT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- configuration -------------------------------------------------------------


def _read_config(path: str) -> dict:
    """``key = value`` lines (``#`` comments) or a JSON object."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad JSON config: {exc}") from None
        return {k.replace("-", "_"): v for k, v in data.items()}
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"bad config file: {exc}") from None
    return {k.replace("-", "_"): v for k, v in cp["run"].items()}


def _merge(args: argparse.Namespace, defaults: dict) -> argparse.Namespace:
    """Fill unset flags from the config file, then from ``defaults``."""
    cfg = _read_config(args.config) if getattr(args, "config", None) else {}
    for key, default in defaults.items():
        if getattr(args, key, None) is not None:
            continue
        if key in cfg:
            raw = cfg[key]
            kind = getattr(args, "_types", {}).get(key) or (
                type(default) if default is not None else str)
            try:
                val = raw if isinstance(raw, kind) or kind is str else kind(raw)
            except (TypeError, ValueError):
                raise UsageError(f"config value {key}={raw!r} is not a valid {kind.__name__}") from None
            setattr(args, key, val)
        else:
            setattr(args, key, default)
    return args


def _threads() -> int:
    raw = os.environ.get("LORENTZ_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"LORENTZ_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("LORENTZ_THREADS must be a positive integer")
    return n


# -- input helpers -------------------------------------------------------------


def _weight(expr: str | None, flag: str) -> Weight:
    if expr is None:
        raise UsageError(f"missing --{flag}")
    return parse_weight(expr)


def _load_json_arg(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _step_arg(args) -> StepFunction:
    if args.seq is not None:
        try:
            return StepFunction.from_sequence([float(v) for v in args.seq.split(",") if v.strip()])
        except ValueError as exc:
            raise UsageError(f"bad --seq: {exc}") from None
    if args.f is None:
        raise UsageError("give the function with --f JSON|@file or --seq v0,v1,...")
    try:
        return StepFunction.from_json(_load_json_arg(args.f))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"bad --f: {exc}") from None


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"missing --{n.replace('_', '-')}")


# -- output --------------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return None
        return "infinite" if math.isinf(x) else x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _emit(report: dict, args, table: list[dict] | None = None):
    text = json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv and table:
        cols = list(table[0].keys())
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        wr.writeheader()
        for row in table:
            wr.writerow(_clean(row))
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def _grid_kw(args) -> dict:
    if args.density < 8:
        raise UsageError("grid density must be at least 8 points per decade")
    return {"per_decade": args.density}


# -- commands ------------------------------------------------------------------

GRID_DEFAULTS = {"t_min": 1e-6, "t_max": 1e6, "density": 64, "seed": 0, "N": fourier.DEFAULT_N}


def cmd_norm(args) -> int:
    _merge(args, {**GRID_DEFAULTS, "kind": "gamma", "weight": None, "p": None,
                  "f": None, "seq": None, "averaging": None})
    w = _weight(args.weight, "weight")
    if args.kind in ("bp", "b1inf"):
        kw = dict(t_min=args.t_min, t_max=args.t_max, **_grid_kw(args))
        if args.kind == "bp":
            _require(args, "p")
            res = norms.bp_constant(w, args.p, **kw)
        else:
            res = norms.b1inf_constant(w, **kw)
        rep = {"command": "norm", "kind": args.kind, "weight": w.to_expr(), "p": args.p,
               "result": res.to_json()}
        verdict = res.meta.get("verdict", "finite")
        rep["verdict"] = verdict
        _emit(rep, args)
        return EXIT_VERDICT if verdict == "infinite" else EXIT_OK
    _require(args, "p")
    f = _step_arg(args)
    if args.kind == "lambda":
        res = norms.lambda_norm(f, args.p, w)
    elif args.kind == "gamma":
        res = norms.gamma_norm(f, args.p, w)
    elif args.kind == "theta":
        fam = None
        if args.averaging:
            fam = [AveragingOp(())] + [AveragingOp.parse(a) for a in args.averaging.split("|")]
        res = norms.theta_norm(f, args.p, w, fam)
    else:
        raise UsageError(f"unknown norm kind {args.kind!r}")
    rep = {"command": "norm", "kind": args.kind, "weight": w.to_expr(), "p": args.p,
           "f": f.to_json(), "result": res.to_json(),
           "verdict": "infinite" if res.infinite else "finite"}
    _emit(rep, args)
    return EXIT_VERDICT if res.infinite else EXIT_OK


def cmd_level(args) -> int:
    _merge(args, {**GRID_DEFAULTS, "weight": None, "f": None, "seq": None})
    if args.weight is not None:
        u = parse_weight(args.weight)
        lvl = level_function(u, t_min=args.t_min, t_max=args.t_max, per_decade=args.density)
        out = {"weight": lvl.to_expr()} if isinstance(lvl, Weight) else {"step": lvl.to_json()}
        rep = {"command": "level", "input": u.to_expr(), "level": out,
               "grid": {"t_min": args.t_min, "t_max": args.t_max, "per_decade": args.density}}
        _emit(rep, args)
        return EXIT_OK
    u = _step_arg(args)
    lvl = level_function(u)
    table = [{"left": a, "right": b, "value": v}
             for a, b, v in zip(lvl.edges[:-1], lvl.edges[1:], lvl.values)]
    _emit({"command": "level", "input": u.to_json(), "level": {"step": lvl.to_json()}}, args, table)
    return EXIT_OK


def cmd_cone(args) -> int:
    _merge(args, {**GRID_DEFAULTS, "alpha": None, "beta": None, "xi": 0.0, "u": None, "v": None,
                  "p": None, "q": None, "averaging": None, "samples": 200})
    _require(args, "alpha", "beta", "p", "q")
    u, v = _weight(args.u, "u"), _weight(args.v, "v")
    A = AveragingOp.parse(args.averaging) if args.averaging else None
    try:
        params = ConeParams(args.alpha, args.beta, args.xi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = ratio_supremum_bounds(params, u, v, args.p, args.q, A, samples=args.samples,
                                seed=args.seed, t_max=args.t_max, per_decade=args.density)
    rep = {"command": "cone", "params": {"alpha": args.alpha, "beta": args.beta, "xi": args.xi,
                                         "p": args.p, "q": args.q, "u": u.to_expr(),
                                         "v": v.to_expr(), "seed": args.seed,
                                         "averaging": None if A is None else A.to_text()},
           "result": res.to_json()}
    rep["verdict"] = "infinite" if math.isinf(res.lower) else "finite"
    _emit(rep, args)
    return EXIT_VERDICT if rep["verdict"] == "infinite" else EXIT_OK


CONDITION_NAMES = ("cxy", "comega", "nolevel", "bhc", "hardy-dual", "llogl", "lz")


def cmd_condition(args) -> int:
    _merge(args, {**GRID_DEFAULTS, "u": None, "w": None, "p": None, "q": None,
                  "r": None, "s": None, "alpha": 0.0, "beta": 0.0, "z_max": conditions.Z_MAX})
    name = args.name
    if name == "lz":
        _require(args, "r", "s", "p", "q")
        rep = conditions.lz_admissible(args.r, args.p, args.alpha, args.s, args.q, args.beta)
    else:
        kw = {"z_max": args.z_max, **_grid_kw(args)}
        u = _weight(args.u, "u")
        if name == "llogl":
            _require(args, "q")
            rep = conditions.llogl_condition(u, args.q, **kw)
        else:
            w = _weight(args.w, "w")
            _require(args, "p")
            if name == "cxy":
                rep = conditions.c_xy(u, w, args.p, **kw)
            else:
                _require(args, "q")
                fn = {"comega": conditions.c_omega, "nolevel": conditions.nolevel_condition,
                      "bhc": conditions.bhc_condition,
                      "hardy-dual": conditions.hardy_dual_condition}[name]
                rep = fn(u, w, args.p, args.q, **kw)
    _emit({"command": "condition", **rep.to_json()}, args)
    return EXIT_VERDICT if rep.fails else EXIT_OK


def cmd_testfun(args) -> int:
    _merge(args, {**GRID_DEFAULTS, "z": None, "averaging": None, "eps": None, "y_max": None})
    _require(args, "z")
    A = AveragingOp.parse(args.averaging)
    tf = fourier.testfun_full(args.z, A, args.eps)
    table = fourier.coefficients(tf.g, args.N)
    star = fourier.coeff_rearrangement(table)
    cert = fourier._certify(star, tf.bound, args.y_max if args.y_max is not None else args.N)
    rep = {"command": "testfun", "params": tf.params, "eps": tf.eps, "function": tf.g.to_json(),
           "certificate": cert.to_json(), "N": args.N, "tail_bound": table.tail_bound,
           "star_head": star.values[:64].tolist()}
    if args.table:
        rep["coefficients"] = table.to_json()
    rows = [{"y": i, "star": v} for i, v in enumerate(star.values[:4096].tolist())]
    _emit(rep, args, rows)
    return EXIT_OK if cert.passed else EXIT_VERDICT


def cmd_verify(args) -> int:
    _merge(args, {**GRID_DEFAULTS, "u": None, "w": None, "p": None, "q": None,
                  "which": "gamma-gamma", "suite": "random:100+adversarial"})
    _require(args, "p", "q")
    u, w = _weight(args.u, "u"), _weight(args.w, "w")
    suite = fourier.parse_suite(args.suite, args.seed)
    rep = fourier.verify_inequality(u, w, args.p, args.q, args.which, suite, args.N,
                                    workers=_threads())
    out = {"command": "verify", "seed": args.seed, "suite": args.suite, **rep.to_json()}
    rows = [{"label": lbl, "ratio": r} for lbl, r, _ in rep.ratios]
    _emit(out, args, rows)
    return EXIT_VERDICT if rep.verdict in ("unbounded", "ceiling-violated") else EXIT_OK


def cmd_jt(args) -> int:
    _merge(args, {**GRID_DEFAULTS, "f": None, "random": None, "z_grid": None})
    zs = ([float(v) for v in args.z_grid.split(",")] if args.z_grid
          else [2.0 ** k for k in range(13)])
    if args.f is not None:
        try:
            funcs = [("input", fourier.ModulatedStep.from_json(_load_json_arg(args.f)))]
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UsageError(f"bad --f: {exc}") from None
    else:
        count = args.random if args.random is not None else 100
        funcs = [(lbl, g) for lbl, g, _ in fourier.random_suite(count, args.seed)]
    reports = fourier.parallel_map(lambda item: (item[0], fourier.jt_check(item[1], zs, args.N)),
                                   funcs, _threads())
    worst = max(r.max_ratio for _, r in reports)
    rep = {"command": "jt-check", "constant": fourier.JT_CONSTANT, "z_grid": zs, "N": args.N,
           "seed": args.seed, "max_ratio": worst, "passed": worst <= fourier.JT_CONSTANT,
           "functions": [{"label": lbl, "max_ratio": r.max_ratio} for lbl, r in reports]}
    _emit(rep, args, rep["functions"])
    return EXIT_OK if rep["passed"] else EXIT_VERDICT


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file (or JSON); flags override it")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="also write the main table as CSV")
    common.add_argument("--t-min", dest="t_min", type=float)
    common.add_argument("--t-max", dest="t_max", type=float)
    common.add_argument("--density", type=int, help="grid points per decade (>= 8)")
    common.add_argument("--seed", type=int)
    common.add_argument("--N", dest="N", type=int, help="coefficient window radius")

    p = _Parser(prog="lorentz-fourier", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("norm", parents=[common], help="Lorentz functionals and B-class constants")
    s.add_argument("--kind", choices=["lambda", "gamma", "theta", "bp", "b1inf"])
    s.add_argument("--weight", "--w", dest="weight")
    s.add_argument("--p", type=float)
    s.add_argument("--f", help="StepFunction JSON or @file")
    s.add_argument("--seq", help="comma-separated sequence (counting measure)")
    s.add_argument("--averaging", help="extra operators for theta, separated by '|'")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("level", parents=[common], help="level function of a weight or step")
    s.add_argument("--weight", "--u", dest="weight")
    s.add_argument("--f")
    s.add_argument("--seq")
    s.set_defaults(func=cmd_level)

    s = sub.add_parser("cone", parents=[common], help="cone ratio bounds")
    for name in ("alpha", "beta", "xi", "p", "q"):
        s.add_argument(f"--{name}", type=float)
    s.add_argument("--u")
    s.add_argument("--v")
    s.add_argument("--averaging")
    s.add_argument("--samples", type=int)
    s.set_defaults(func=cmd_cone)

    s = sub.add_parser("condition", parents=[common], help="weight conditions")
    s.add_argument("name", choices=CONDITION_NAMES)
    s.add_argument("--u")
    s.add_argument("--w")
    for name in ("p", "q", "r", "s", "alpha", "beta"):
        s.add_argument(f"--{name}", type=float)
    s.add_argument("--z-max", dest="z_max", type=float)
    s.set_defaults(func=cmd_condition)

    s = sub.add_parser("testfun", parents=[common], help="build and certify a test function")
    s.add_argument("--z", type=float)
    s.add_argument("--averaging")
    s.add_argument("--eps", type=float)
    s.add_argument("--y-max", dest="y_max", type=int)
    s.add_argument("--table", action="store_true", help="embed the full coefficient table")
    s.set_defaults(func=cmd_testfun)

    s = sub.add_parser("verify", parents=[common], help="empirical Fourier inequality constant")
    s.add_argument("--u")
    s.add_argument("--w")
    s.add_argument("--p", type=float)
    s.add_argument("--q", type=float)
    s.add_argument("--which", choices=["gamma-gamma", "gamma-lambda", "lambda-lambda"])
    s.add_argument("--suite")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("jt-check", parents=[common], help="check the rearrangement inequality with constant 8")
    s.add_argument("--f", help="ModulatedStep JSON or @file")
    s.add_argument("--random", type=int, help="number of seeded random functions")
    s.add_argument("--z-grid", dest="z_grid")
    s.set_defaults(func=cmd_jt)
    for sp in sub.choices.values():
        sp.set_defaults(_types={a.dest: a.type for a in sp._actions if a.type is not None})
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WeightSyntaxError as exc:
        print(f"error: bad weight expression: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
