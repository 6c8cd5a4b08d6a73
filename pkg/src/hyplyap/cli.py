"""Command line driver: estimates, Hodge data, and the scan experiments."""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import experiments, hodge, lyapunov, monodromy, winding
from .errors import HyplyapError
from .geodesic import digit_stream
from .params import HGParams, parse_parameter


def _read_config(path: str) -> dict:
    """Plain key-value config ('digits = 2000000', '#' comments)."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, value = line.split("=", 1)
            else:
                key, value = line.split(None, 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


_RUN_FLAG_TYPES = {
    "digits": int, "seed": int, "workers": int, "windows": int,
    "qr_period": int, "refresh": int, "out": str, "json": lambda v: v in ("1", "true", "yes"),
    "grid": int, "alpha": str, "beta": str,
}


def _add_run_flags(sub, digits_default: int):
    sub.add_argument("--digits", type=int, default=digits_default,
                     help="continued-fraction digits per estimate")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--windows", type=int, default=20,
                     help="batch-means windows for the error bars")
    sub.add_argument("--qr-period", type=int, default=8, dest="qr_period")
    sub.add_argument("--refresh", type=int, default=32,
                     help="orbit refresh period in digits")
    sub.add_argument("--out", type=str, default=None, help="CSV output path")
    sub.add_argument("--json", action="store_true", help="print JSON to stdout")
    sub.add_argument("--config", type=str, default=None,
                     help="key-value file mirroring the flags")


def _run_config(args) -> lyapunov.RunConfig:
    return lyapunov.RunConfig(
        digits=args.digits, seed=args.seed, refresh_period=args.refresh,
        qr_period=args.qr_period, windows=args.windows, workers=args.workers,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyplyap",
        description="Lyapunov exponents and parabolic degrees for "
                    "hypergeometric flat bundles over the thrice-punctured sphere",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    est = subs.add_parser("estimate", help="Lyapunov spectrum of one parameter set")
    est.add_argument("--alpha", nargs="+", help="alpha parameters (decimal or p/q)")
    est.add_argument("--beta", nargs="+", help="beta parameters (decimal or p/q)")
    est.add_argument("--cy", nargs=2, type=float, metavar=("C", "D"),
                     help="use the Calabi-Yau generators for (C, d) instead")
    _add_run_flags(est, 1000000)

    hod = subs.add_parser("hodge", help="diagram, Hodge numbers and degrees")
    hod.add_argument("--alpha", nargs="+", required=True)
    hod.add_argument("--beta", nargs="+", required=True)

    cyt = subs.add_parser("cy-table", help="the 14 Calabi-Yau families")
    _add_run_flags(cyt, 2000000)

    scan = subs.add_parser("scan-mu", help="scan targets in the (mu1, mu2) triangle")
    scan.add_argument("--grid", type=int, default=None, help="N x N triangle grid")
    scan.add_argument("--points", type=str, default=None,
                      help="semicolon list 'mu1,mu2;mu1,mu2;...'")
    _add_run_flags(scan, 200000)

    n2 = subs.add_parser("n2", help="rank-2 zone scan over (r, x)")
    n2.add_argument("--r", nargs="+", required=True, help="r values")
    n2.add_argument("--x", nargs="+", required=True, help="x values")
    _add_run_flags(n2, 200000)

    w2 = subs.add_parser("weight2", help="weight-2 scan over marker gaps (x, y)")
    w2.add_argument("--xmin", type=float, default=0.02)
    w2.add_argument("--xmax", type=float, default=0.12)
    w2.add_argument("--xsteps", type=int, default=6)
    w2.add_argument("--ymin", type=float, default=0.02)
    w2.add_argument("--ymax", type=float, default=0.12)
    w2.add_argument("--ysteps", type=int, default=6)
    _add_run_flags(w2, 200000)

    dig = subs.add_parser("digits", help="dump the digit stream as CSV")
    dig.add_argument("--seed", type=int, default=0)
    dig.add_argument("--digits", type=int, default=1000)
    dig.add_argument("--refresh", type=int, default=32)
    dig.add_argument("--out", type=str, default=None)

    win = subs.add_parser("winding", help="dump per-run winding events as CSV")
    win.add_argument("--seed", type=int, default=0)
    win.add_argument("--digits", type=int, default=1000)
    win.add_argument("--refresh", type=int, default=32)
    win.add_argument("--out", type=str, default=None)

    return parser


def _apply_config(args, argv) -> None:
    if getattr(args, "config", None) is None:
        return
    loaded = _read_config(args.config)
    for key, raw in loaded.items():
        if not hasattr(args, key):
            continue
        caster = _RUN_FLAG_TYPES.get(key, str)
        # explicit command line flags win over the config file
        if f"--{key.replace('_', '-')}" not in argv:
            setattr(args, key, caster(raw))


def _params_from_args(args) -> HGParams:
    return HGParams.from_strings(args.alpha, args.beta)


def _estimate_json(est: lyapunov.LyapunovEstimate) -> dict:
    return {
        "exponents": list(est.exponents),
        "stderr": list(est.stderr),
        "sum_positive": est.sum_positive,
        "time": est.elapsed_time,
        "digits": est.digits_used,
    }


def _emit_rows(args, kind: str, rows: list[dict]) -> None:
    columns = experiments.COLUMNS_BY_KIND[kind]
    if args.out:
        experiments.write_rows(args.out, columns, rows)
        print(f"wrote {len(rows)} rows to {args.out}")
    if args.json or not args.out:
        json.dump(rows, sys.stdout, indent=1)
        print()


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, argv)
    try:
        return _dispatch(parser, args)
    except HyplyapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(parser, args) -> int:

    if args.command == "estimate":
        if args.cy is not None:
            T, S = experiments.cy_matrices(args.cy[0], args.cy[1])
            ms = monodromy.from_explicit(T, S)
        else:
            if not args.alpha or not args.beta:
                parser.error("estimate needs --alpha/--beta or --cy")
            ms = monodromy.build(_params_from_args(args))
        est = lyapunov.estimate(ms, _run_config(args))
        json.dump(_estimate_json(est), sys.stdout, indent=1)
        print()
        return 0

    if args.command == "hodge":
        params = _params_from_args(args)
        diagram = hodge.analyze(params)
        degrees = hodge.parabolic_degrees(diagram)
        json.dump({
            "f_alpha": list(diagram.f_alpha()),
            "f_beta": list(diagram.f_beta()),
            "h": list(diagram.h),
            "gamma": diagram.gamma,
            "gamma_floor": diagram.gamma_floor,
            "signature": list(diagram.signature),
            "delta": list(degrees.delta),
            "deg_par": list(degrees.deg_par),
        }, sys.stdout, indent=1)
        print()
        return 0

    if args.command == "cy-table":
        rows = experiments.cy_table(_run_config(args))
        _emit_rows(args, "cy", rows)
        return 0

    if args.command == "scan-mu":
        if args.points:
            points = []
            for chunk in args.points.split(";"):
                a, b = chunk.split(",")
                points.append((parse_parameter(a), parse_parameter(b)))
        elif args.grid:
            points = experiments.mu_grid(args.grid)
        else:
            parser.error("scan-mu needs --grid or --points")
        rows = experiments.scan_mu_plane(points, _run_config(args))
        _emit_rows(args, "mu-scan", rows)
        return 0

    if args.command == "n2":
        r_values = [parse_parameter(v) for v in args.r]
        x_values = [parse_parameter(v) for v in args.x]
        rows = experiments.n2_scan(r_values, x_values, _run_config(args))
        _emit_rows(args, "n2", rows)
        return 0

    if args.command == "weight2":
        xs = np.linspace(args.xmin, args.xmax, args.xsteps)
        ys = np.linspace(args.ymin, args.ymax, args.ysteps)
        rows = experiments.weight2_scan(xs, ys, _run_config(args))
        _emit_rows(args, "weight2", rows)
        return 0

    if args.command == "digits":
        with _open_out(args) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "digit", "letter", "roofTime", "refreshed"])
            for i, ev in enumerate(digit_stream(args.seed, args.digits, args.refresh)):
                writer.writerow([i, ev.digit, ev.letter, ev.roof_time, int(ev.refreshed)])
        return 0

    if args.command == "winding":
        with _open_out(args) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["runIndex", "letter", "runLength", "cusp", "turns"])
            coset = winding.COSET_START
            for i, ev in enumerate(digit_stream(args.seed, args.digits, args.refresh)):
                event_cusp = winding.run_cusp(coset, ev.letter)
                turns = (ev.digit // 2) if ev.letter == "L" else -(ev.digit // 2)
                writer.writerow([i, ev.letter, ev.digit, event_cusp, turns])
                coset = winding.run_coset(coset, ev.letter, ev.digit)
        return 0

    parser.error(f"unknown command {args.command}")
    return 2


class _StdoutHandle:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        return False


def _open_out(args):
    if args.out:
        return open(args.out, "w", encoding="utf-8", newline="")
    return _StdoutHandle()


if __name__ == "__main__":
    sys.exit(main())
