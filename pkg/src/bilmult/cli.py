"""Command line front end.

Subcommands: ``norm`` (Lorentz quasi-norm of a function file), ``apply``
(run one operator on a pair of function files), ``lemma`` (the three
norm-comparison sweeps), ``transfer`` (the full torus/line experiment) and
``gcheck`` (mollification limit of a symbol).  Every experiment subcommand
writes a JSON report; exit status is 0 when all verdicts pass, 1 when any
fails, 2 for unusable inputs or arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import fileio
from .funcspace import SampledFunction, TrigPolynomial
from .lorentz import Domain, LorentzExponents, NormMethod, lorentz_norm
from .operators import apply_Cm, apply_Pm
from .funcspace import GridSpec
from .transference import (
    check_g_regulated,
    check_lemma_realtoro,
    check_lemma_sandwich,
    check_lemma_tororealdos,
    run_transference_experiment,
)

USAGE_ERROR = 2


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return USAGE_ERROR


def _load_function_checked(path: str):
    try:
        return fileio.load_function(path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise SystemExit(_fail(f"cannot read function {path}: {exc}"))


def _load_symbol_checked(path: str):
    try:
        return fileio.load_symbol(path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise SystemExit(_fail(f"cannot read symbol {path}: {exc}"))


def _emit_report(report, json_path: str | None, csv_path: str | None, default: str) -> None:
    path = json_path or default
    fileio.write_report_json(report.to_dict(), path)
    print(f"report written to {path}")
    if csv_path:
        fileio.write_report_csv(report.points, csv_path)
        print(f"sweep table written to {csv_path}")


def _print_verdicts(report) -> int:
    for name, ok in report.verdicts.items():
        print(f"  {name}: {'PASS' if ok else 'FAIL'}")
    print(f"overall: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# norm


def _cmd_norm(args) -> int:
    fn = _load_function_checked(args.function)
    try:
        exps = fileio.parse_exponents(args.exponents)
        if len(exps) != 2:
            raise ValueError("norm takes a single (p, q) pair")
        domain = Domain.TORUS if args.domain == "torus" else Domain.LINE
        if isinstance(fn, TrigPolynomial) and domain is Domain.LINE:
            raise ValueError("trigonometric polynomials only have torus norms")
        lexp = LorentzExponents(exps[0], exps[1], domain)
        method = (
            NormMethod.DISTRIBUTION_INTEGRAL
            if args.method == "distribution"
            else NormMethod.REARRANGEMENT
        )
        value = lorentz_norm(fn, lexp, method=method, grid_points=args.grid_points)
    except ValueError as exc:
        return _fail(str(exc))
    print(repr(value))
    return 0


# ---------------------------------------------------------------------------
# apply


def _cmd_apply(args) -> int:
    m = _load_symbol_checked(args.symbol)
    f = _load_function_checked(args.f)
    g = _load_function_checked(args.g)
    try:
        if args.setting == "torus":
            if not (isinstance(f, TrigPolynomial) and isinstance(g, TrigPolynomial)):
                raise ValueError("torus operators act on trigonometric polynomials")
            out = apply_Pm((m, args.t), f, g)
            summary = f"degree {out.degree}, coefficient l1 {out.coeff_l1():.6g}"
        else:
            if not (isinstance(f, SampledFunction) and isinstance(g, SampledFunction)):
                raise ValueError("line operators act on sampled step functions")
            if args.t != 1.0:
                m = m.dilated(args.t)
            grid = GridSpec(f.n, f.x0, f.dx)
            out = apply_Cm(
                m, f, g, grid, xi_band=args.xi_band, xi_step=args.xi_step
            )
            summary = f"{out.n} cells, sup magnitude {np.abs(out.samples).max():.6g}"
    except ValueError as exc:
        return _fail(str(exc))
    if args.out:
        fileio.save_function(out, args.out)
        print(f"result written to {args.out} ({summary})")
    else:
        print(summary)
    return 0


# ---------------------------------------------------------------------------
# lemma


def _cmd_lemma(args) -> int:
    try:
        exps = fileio.parse_exponents(args.exponents)
        if len(exps) != 2:
            raise ValueError("lemma checks take a single (p, q) pair")
        p, q = exps
        if args.which == "realtoro":
            fn = _load_function_checked(args.function)
            if not isinstance(fn, SampledFunction):
                raise ValueError("realtoro needs a sampled line function")
            sweep = fileio.parse_sweep(args.sweep)
            report = check_lemma_realtoro(fn, p, q, sweep, tail_tol=args.tail_tol)
        elif args.which == "tororealdos":
            fn = _load_function_checked(args.function)
            if not isinstance(fn, TrigPolynomial):
                raise ValueError("tororealdos needs a trigonometric polynomial")
            report = check_lemma_tororealdos(
                fn, p, q, args.k, grid_points=args.grid_points
            )
        else:
            fn = _load_function_checked(args.function)
            phi = _load_function_checked(args.envelope)
            if not isinstance(phi, SampledFunction):
                raise ValueError("the envelope must be a sampled line function")
            sweep = fileio.parse_sweep(args.sweep)
            report = check_lemma_sandwich(
                fn, phi, p, q, sweep, grid_points=args.grid_points, slack=args.slack
            )
    except ValueError as exc:
        return _fail(str(exc))
    _emit_report(report, args.report, args.csv, f"bilmult_lemma_{args.which}.json")
    return _print_verdicts(report)


# ---------------------------------------------------------------------------
# transfer


_TRANSFER_DEFAULTS = {
    "exponents": "2,2,2,2,1,1",
    "t_grid": "geometric:1..2^-6:7",
    "trials": 48,
    "seed": 1234,
    "grid_points": 2048,
    "max_degree": 16,
    "line_trials": None,
    "stability_tol": 0.2,
}


def _cmd_transfer(args) -> int:
    cfg = dict(_TRANSFER_DEFAULTS)
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                user_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            return _fail(f"cannot read config {args.config}: {exc}")
        unknown = set(user_cfg) - set(cfg) - {"symbol"}
        if unknown:
            return _fail(f"unknown config keys: {sorted(unknown)}")
        cfg.update(user_cfg)
    for key in cfg:
        override = getattr(args, key, None)
        if override is not None:
            cfg[key] = override
    symbol_path = args.symbol or cfg.get("symbol")
    if not symbol_path:
        return _fail("a symbol file is required (--symbol or config)")
    m = _load_symbol_checked(symbol_path)
    try:
        exps = fileio.parse_exponents(str(cfg["exponents"]))
        if len(exps) != 6:
            raise ValueError("transfer needs six exponents p1,q1,p2,q2,p3,q3")
        t_grid = fileio.parse_sweep(str(cfg["t_grid"]))
        report = run_transference_experiment(
            m,
            exps,
            t_grid,
            int(cfg["trials"]),
            int(cfg["seed"]),
            grid_points=int(cfg["grid_points"]),
            max_degree=int(cfg["max_degree"]),
            line_trials=None if cfg["line_trials"] is None else int(cfg["line_trials"]),
            stability_tol=float(cfg["stability_tol"]),
        )
    except ValueError as exc:
        return _fail(str(exc))
    _emit_report(report, args.report, args.csv, "bilmult_transfer.json")
    print(
        "sup torus max ratio {:.6g}; line max ratio {:.6g}; certificate A*line {:.6g}".format(
            report.details["sup_torus_max_ratio"],
            report.details["line"]["max_ratio"],
            report.details["certificate_A_times_line"],
        )
    )
    return _print_verdicts(report)


# ---------------------------------------------------------------------------
# gcheck


def _parse_points(text: str) -> list:
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        xy = chunk.split(",")
        if len(xy) != 2:
            raise ValueError(f"bad point {chunk!r}; expected 'x,y'")
        pts.append((float(xy[0]), float(xy[1])))
    if not pts:
        raise ValueError("no probe points given")
    return pts


def _cmd_gcheck(args) -> int:
    m = _load_symbol_checked(args.symbol)
    try:
        pts = _parse_points(args.points)
        eps_seq = fileio.parse_sweep(args.eps)
        report = check_g_regulated(
            m, pts, eps_seq, tail_tol=args.tail_tol, noise=args.noise
        )
    except ValueError as exc:
        return _fail(str(exc))
    _emit_report(report, args.report, args.csv, "bilmult_gcheck.json")
    return _print_verdicts(report)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bilmult",
        description="bilinear multiplier operators and Lorentz norms on the line and the torus",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="Lorentz quasi-norm of a function file")
    p_norm.add_argument("--function", required=True)
    p_norm.add_argument("--exponents", required=True, help="p,q (inf allowed for q)")
    p_norm.add_argument("--domain", choices=("line", "torus"), default="line")
    p_norm.add_argument(
        "--method", choices=("rearrangement", "distribution"), default="rearrangement"
    )
    p_norm.add_argument("--grid-points", type=int, default=4096, dest="grid_points")
    p_norm.set_defaults(func=_cmd_norm)

    p_apply = sub.add_parser("apply", help="apply a bilinear multiplier operator")
    p_apply.add_argument("--symbol", required=True)
    p_apply.add_argument("--f", required=True)
    p_apply.add_argument("--g", required=True)
    p_apply.add_argument("--setting", choices=("line", "torus"), default="line")
    p_apply.add_argument("--t", type=float, default=1.0, help="symbol dilation")
    p_apply.add_argument("--xi-band", type=float, default=8.0, dest="xi_band")
    p_apply.add_argument("--xi-step", type=float, default=1.0 / 16.0, dest="xi_step")
    p_apply.add_argument("--out", default=None, help="write the result function here")
    p_apply.set_defaults(func=_cmd_apply)

    p_lemma = sub.add_parser("lemma", help="norm-comparison sweeps")
    lsub = p_lemma.add_subparsers(dest="which", required=True)

    l_rt = lsub.add_parser("realtoro", help="dilate+periodize against the line norm")
    l_rt.add_argument("--function", required=True)
    l_rt.add_argument("--exponents", required=True)
    l_rt.add_argument("--sweep", default="geometric:2^-1..2^-6:6")
    l_rt.add_argument("--tail-tol", type=float, default=0.02, dest="tail_tol")
    l_rt.add_argument("--report", default=None)
    l_rt.add_argument("--csv", default=None)
    l_rt.set_defaults(func=_cmd_lemma)

    l_td = lsub.add_parser("tororealdos", help="exact box-window equality")
    l_td.add_argument("--function", required=True)
    l_td.add_argument("--exponents", required=True)
    l_td.add_argument("--k", type=int, default=3)
    l_td.add_argument("--grid-points", type=int, default=512, dest="grid_points")
    l_td.add_argument("--report", default=None)
    l_td.add_argument("--csv", default=None)
    l_td.set_defaults(func=_cmd_lemma)

    l_sw = lsub.add_parser("sandwich", help="radial window bracket")
    l_sw.add_argument("--function", required=True)
    l_sw.add_argument("--envelope", required=True)
    l_sw.add_argument("--exponents", required=True)
    l_sw.add_argument("--sweep", default="geometric:2^-2..2^-7:6")
    l_sw.add_argument("--grid-points", type=int, default=128, dest="grid_points")
    l_sw.add_argument("--slack", type=float, default=0.05)
    l_sw.add_argument("--report", default=None)
    l_sw.add_argument("--csv", default=None)
    l_sw.set_defaults(func=_cmd_lemma)

    p_tr = sub.add_parser("transfer", help="torus/line transference experiment")
    p_tr.add_argument("--symbol", default=None)
    p_tr.add_argument("--config", default=None, help="JSON defaults, overridden by flags")
    p_tr.add_argument("--exponents", default=None, help="p1,q1,p2,q2,p3,q3")
    p_tr.add_argument("--t-grid", default=None, dest="t_grid")
    p_tr.add_argument("--trials", type=int, default=None)
    p_tr.add_argument("--seed", type=int, default=None)
    p_tr.add_argument("--grid-points", type=int, default=None, dest="grid_points")
    p_tr.add_argument("--max-degree", type=int, default=None, dest="max_degree")
    p_tr.add_argument("--line-trials", type=int, default=None, dest="line_trials")
    p_tr.add_argument(
        "--stability-tol", type=float, default=None, dest="stability_tol"
    )
    p_tr.add_argument("--report", default=None)
    p_tr.add_argument("--csv", default=None)
    p_tr.set_defaults(func=_cmd_transfer)

    p_gc = sub.add_parser("gcheck", help="mollification limit of a symbol")
    p_gc.add_argument("--symbol", required=True)
    p_gc.add_argument("--points", required=True, help="semicolon list of x,y pairs")
    p_gc.add_argument("--eps", default="geometric:2^-1..2^-6:6")
    p_gc.add_argument("--tail-tol", type=float, default=1e-2, dest="tail_tol")
    p_gc.add_argument("--noise", type=float, default=1e-3)
    p_gc.add_argument("--report", default=None)
    p_gc.add_argument("--csv", default=None)
    p_gc.set_defaults(func=_cmd_gcheck)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalise other codes
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0


if __name__ == "__main__":
    sys.exit(main())
