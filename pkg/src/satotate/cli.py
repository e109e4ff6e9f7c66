"""Command-line interface.

Every command writes its primary artifact (CSV or JSON lines) to ``--out``
or stdout; report commands also render a PNG next to ``--out``.  Failures
print a JSON object on stderr and exit with 2 (bad input) or 3 (computation).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import distinguish as dist
from . import equidist, kernel, plotting
from .curves import SingularCurveError, TableTooLarge
from .io import InputError, atomic_write, load_or_build, parse_curve, parse_interval

log = logging.getLogger("satotate")

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--curve", help="a1,a2,a3,a4,a6 | a4,a6 | known label such as 11a1")
    common.add_argument("--curve2")
    common.add_argument("--x", type=_floats, default=[1e4],
                        help="cutoff; several comma-separated values for discrepancy")
    common.add_argument("--interval", default="0:1", help="lo:hi in units of pi")
    common.add_argument("--interval2", default="0:1")
    common.add_argument("--ell", type=int, default=None)
    common.add_argument("--conductor", default=None,
                        help="conductor override, N or N1,N2 for two curves")
    common.add_argument("--degree", type=int, default=1)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--out", default=None, help="artifact path; figures go alongside")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cache-dir", default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="satotate", description="Frobenius-angle statistics of elliptic curves over Q")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("ap", parents=[common], help="trace table p,reduction,a_p")
    sub.add_parser("angles", parents=[common], help="Frobenius angles and histogram")
    kc = sub.add_parser("kernel-check", parents=[common], help="smoothed-indicator coefficients")
    kc.add_argument("--A", type=float, default=0.1)
    kc.add_argument("--B", type=float, default=0.35)
    kc.add_argument("--delta", type=float, default=0.05)
    kc.add_argument("--r", type=int, default=1)
    kc.add_argument("--m-max", type=int, default=5000)
    sub.add_parser("discrepancy", parents=[common], help="single-curve discrepancy report")
    sub.add_parser("joint", parents=[common], help="two-curve discrepancy report")
    sub.add_parser("distinguish", parents=[common], help="smallest distinguishing primes")
    sub.add_parser("bounds", parents=[common], help="balancing parameters and bound shapes")
    return p


def _conductors(args) -> list:
    if args.conductor is None:
        return [None, None]
    vals = [int(s) for s in str(args.conductor).split(",")]
    return (vals + [None])[:2]


def _curves(args, n: int):
    names = [args.curve, args.curve2][:n]
    if any(c is None for c in names):
        raise InputError(f"{args.command} needs --curve" + (" and --curve2" if n == 2 else ""))
    conds = _conductors(args)
    return [parse_curve(c, conductor=N) for c, N in zip(names, conds)]


def _cutoff(args) -> float:
    x = max(args.x)
    if min(args.x) < 2:
        raise InputError("x must be at least 2")
    return x


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _jsonl(objs) -> str:
    return "".join(json.dumps(o, sort_keys=True, allow_nan=False) + "\n" for o in objs)


def _emit(args, text: str, figures: dict | None = None):
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    atomic_write(out, text)
    for suffix, png in (figures or {}).items():
        atomic_write(out.with_name(out.stem + suffix + ".png"), png)


def _fmt(v: float) -> str:
    return repr(float(v))


def cmd_ap(args):
    (curve,) = _curves(args, 1)
    table = load_or_build(curve, _cutoff(args), args.cache_dir, args.threads)
    recs = [r for r in table.records if r.p <= _cutoff(args)]
    if args.format == "csv":
        text = _csv_text(["p", "reduction", "a_p"],
                         [[r.p, r.reduction, "" if r.a_p is None else r.a_p] for r in recs])
    else:
        text = _jsonl({"p": r.p, "reduction": r.reduction, "a_p": r.a_p} for r in recs)
    _emit(args, text)


def cmd_angles(args):
    (curve,) = _curves(args, 1)
    x = _cutoff(args)
    table = load_or_build(curve, x, args.cache_dir, args.threads)
    mask = table.good_upto(x)
    rows = list(zip(table.primes[mask].tolist(), table.a_p[mask].tolist(), table.theta[mask]))
    if args.format == "csv":
        text = _csv_text(["p", "a_p", "theta"], [[p, a, _fmt(t)] for p, a, t in rows])
    else:
        text = _jsonl({"p": p, "a_p": a, "theta": float(t)} for p, a, t in rows)
    fig = plotting.angle_histogram(table.theta[mask], title=f"{curve.name}, p <= {x:g}")
    _emit(args, text, {"": fig})


def cmd_kernel_check(args):
    params = kernel.validate_params(args.A, args.B, args.delta, args.r)
    m = np.arange(1, args.m_max + 1)
    a, b = kernel.fourier_coefficients(params, m)
    bound = kernel.coefficient_bound(params, m)
    violations = int(np.count_nonzero((np.abs(a) > bound + 1e-12) | (np.abs(b) > bound + 1e-12)))
    rows = [[0, _fmt(params.width), _fmt(0.0), ""]]
    rows += [[int(i), _fmt(ai), _fmt(bi), _fmt(bd)] for i, ai, bi, bd in zip(m, a, b, bound)]
    if args.format == "csv":
        text = _csv_text(["m", "a_m", "b_m", "bound"], rows)
    else:
        text = _jsonl([{"kind": "kernel-check", "A": params.A, "B": params.B,
                        "Delta": params.Delta, "r": params.r, "m_max": args.m_max,
                        "violations": violations,
                        "max_slack": float(np.max(np.maximum(np.abs(a), np.abs(b)) - bound))}])
    fig = plotting.coefficient_plot(m, a, b, bound, title=(
        f"A={params.A:g}, B={params.B:g}, Delta={params.Delta:g}, r={params.r}"))
    _emit(args, text, {"": fig})
    if violations:
        raise ArithmeticError(f"{violations} coefficients exceed the bound")


def cmd_discrepancy(args):
    (curve,) = _curves(args, 1)
    xs = sorted(set(args.x))
    interval = parse_interval(args.interval)
    table = load_or_build(curve, _cutoff(args), args.cache_dir, args.threads)
    reports = [equidist.discrepancy_report(table, interval, x) for x in xs]
    objs = [r.to_dict() for r in reports]
    if len(reports) >= 3:
        objs.append({"kind": "fit", "curve": curve.name, "interval": list(interval),
                     "xs": xs, "slope": equidist.bound_shape_fit(reports)})
    if args.format == "csv":
        text = _csv_text(["x", "observed", "main", "diff", "ratio"],
                         [[_fmt(r.x), r.observed, _fmt(r.main_term), _fmt(r.difference),
                           _fmt(r.ratio)] for r in reports])
    else:
        text = _jsonl(objs)
    figs = {
        "": plotting.discrepancy_plot(xs, [r.observed for r in reports],
                                      [r.main_term for r in reports],
                                      [r.ratio for r in reports],
                                      title=f"{curve.name}, I = [{interval[0]:g}, {interval[1]:g}] pi"),
        "-angles": plotting.angle_histogram(table.theta[table.good_upto(max(xs))], curve.name),
    }
    _emit(args, text, figs)


def cmd_joint(args):
    c1, c2 = _curves(args, 2)
    x = _cutoff(args)
    t1 = load_or_build(c1, x, args.cache_dir, args.threads)
    t2 = load_or_build(c2, x, args.cache_dir, args.threads)
    # caches may reach different cutoffs; both are cut back to x
    i1, i2 = parse_interval(args.interval), parse_interval(args.interval2)
    rep = equidist.joint_discrepancy_report(t1, t2, i1, i2, x)
    if args.format == "csv":
        text = _csv_text(["x", "observed", "main", "diff", "ratio"],
                         [[_fmt(rep.x), rep.observed, _fmt(rep.main_term), _fmt(rep.difference),
                           _fmt(rep.ratio)]])
    else:
        text = _jsonl([rep.to_dict()])
    m1, m2 = t1.upto(x), t2.upto(x)
    good = t1.good[m1] & t2.good[m2]
    fig = plotting.joint_scatter(t1.theta[m1][good], t2.theta[m2][good],
                                 title=f"{c1.name} vs {c2.name}, p <= {x:g}")
    _emit(args, text, {"": fig})


def cmd_distinguish(args):
    c1, c2 = _curves(args, 2)
    x = _cutoff(args)
    t1 = load_or_build(c1, x, args.cache_dir, args.threads)
    t2 = load_or_build(c2, x, args.cache_dir, args.threads)
    results = [dist.find_opposite_sign(t1, t2, x), dist.find_unequal(t1, t2, x),
               dist.find_mod_l(t1, t2, args.ell or 2, x)]
    if args.format == "csv":
        text = _csv_text(["criterion", "p_star", "a_p1", "a_p2", "bound_value", "within_bound"],
                         [[r.criterion, r.p_star if r.found else "",
                           *(r.a_p if r.found else ("", "")), _fmt(r.bound_value),
                           "" if r.within_bound is None else r.within_bound]
                          for r in results])
    else:
        text = _jsonl(r.to_dict() for r in results)
    _emit(args, text)


def cmd_bounds(args):
    import math
    conds = _conductors(args)
    if args.curve:
        curves = _curves(args, 2 if args.curve2 else 1)
        N = math.prod(c.conductor for c in curves)
    elif conds[0] is not None:
        N = math.prod(c for c in conds if c is not None)
    else:
        raise InputError("bounds needs --conductor or --curve")
    d = args.degree
    objs = []
    for x in sorted(set(args.x)):
        if x <= 1:
            raise InputError("x must exceed 1")
        lnx = math.log(N * x)
        shapes = {
            "single": (equidist.single_params, d**0.5 * x**0.75 * lnx**0.5),
            "joint": (equidist.joint_params, d ** (1 / 3) * x ** (5 / 6) * lnx ** (1 / 3)),
            "distinguish": (equidist.distinguish_params, dist.opposite_sign_bound(N, d)),
        }
        obj = {"kind": "bounds", "x": x, "conductor": N, "degree": d}
        for key, (fn, shape) in shapes.items():
            bal = fn(x, N, d, strict=False)
            obj[key] = {"Delta": bal.Delta, "M": bal.M, "r": bal.r, "in_regime": bal.in_regime,
                        "error_shape": shape}
        objs.append(obj)
    if args.format == "csv":
        text = _csv_text(["x", "kind", "Delta", "M", "r", "in_regime", "error_shape"],
                         [[_fmt(o["x"]), k, _fmt(o[k]["Delta"]), o[k]["M"], o[k]["r"],
                           o[k]["in_regime"], _fmt(o[k]["error_shape"])]
                          for o in objs for k in ("single", "joint", "distinguish")])
    else:
        text = _jsonl(objs)
    _emit(args, text)


COMMANDS = {
    "ap": cmd_ap,
    "angles": cmd_angles,
    "kernel-check": cmd_kernel_check,
    "discrepancy": cmd_discrepancy,
    "joint": cmd_joint,
    "distinguish": cmd_distinguish,
    "bounds": cmd_bounds,
}

INPUT_ERRORS = (InputError, kernel.KernelParamError, SingularCurveError, TableTooLarge,
                argparse.ArgumentTypeError)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.threads < 1:
            raise InputError("--threads must be positive")
        COMMANDS[args.command](args)
        return EXIT_OK
    except INPUT_ERRORS as exc:
        code = EXIT_INPUT
        err = exc
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        code = EXIT_COMPUTE
        err = exc
    sys.stderr.write(json.dumps({"error": type(err).__name__, "message": str(err),
                                 "exit_code": code}, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
