"""Command-line front end: ``clusteresd {sweep,threshold,table1,verify}``.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import analysis, oracle
from .noise import DephasingProfile

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAIL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


_PI = re.compile(r"^([-+]?[0-9.]*)\*?pi(?:/([0-9.]+))?$")


def parse_number(text: str) -> float:
    """A float, or a multiple of pi such as ``pi``, ``2pi``, ``3*pi/4``."""
    text = text.strip().lower()
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI.match(text)
    if not m:
        raise UsageError(f"cannot read number {text!r}")
    k = m.group(1)
    k = -1.0 if k == "-" else float(k) if k not in ("", "+") else 1.0
    return k * np.pi / (float(m.group(2)) if m.group(2) else 1.0)


def parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} must look like lo:hi:n")
    try:
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"grid size {parts[2]!r} is not an integer") from None
    if n < 1:
        raise UsageError("grid size must be positive")
    return parse_number(parts[0]), parse_number(parts[1]), n


def parse_floats(text: str) -> list[float]:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def split_metrics(values) -> list[str]:
    """Split comma lists, leaving commas inside parentheses alone."""
    out = []
    for v in values or ():
        out += [t.strip() for t in re.split(r",(?![^()]*\))", v) if t.strip()]
    return out


def read_config(path) -> list[str]:
    """key=value lines (``#`` comments allowed) as a flag list."""
    tokens = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes") and key in ("no-grid", "no_grid", "json"):
            tokens.append(flag)
        else:
            tokens += [flag, value]
    return tokens


def _profile(args):
    chosen = [n for n in ("profile", "p", "kappa", "schedule") if getattr(args, n) is not None]
    if args.tau is not None and args.kappa is None:
        raise UsageError("--tau needs --kappa")
    if len(chosen) > 1:
        raise UsageError(f"choose one dephasing profile option, got {', '.join('--' + c for c in chosen)}")
    if args.p_grid is not None and chosen:
        raise UsageError("--p-grid and a fixed dephasing profile are mutually exclusive")
    if args.profile is not None:
        ps = parse_floats(args.profile)
        if len(ps) != 4:
            raise UsageError("--profile needs four strengths")
        return DephasingProfile(tuple(ps))
    if args.p is not None:
        return DephasingProfile.uniform(parse_number(args.p))
    if args.kappa is not None:
        if args.tau is None:
            raise UsageError("--kappa needs --tau")
        return DephasingProfile.from_time(parse_number(args.kappa), parse_number(args.tau))
    if args.schedule is not None:
        parts = args.schedule.split(":")
        if len(parts) != 3:
            raise UsageError("--schedule must look like base:dp:k1,k2,k3,k4")
        ks = [int(k) for k in parts[2].split(",")]
        if len(ks) != 4:
            raise UsageError("--schedule needs four offsets")
        return DephasingProfile.from_schedule(parse_number(parts[0]), parse_number(parts[1]), ks)
    return None


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_sweep(args) -> int:
    metrics = split_metrics(args.metric)
    if not metrics:
        raise UsageError("sweep needs at least one --metric")
    axes = []
    if args.p_grid is not None:
        axes.append(analysis.Axis.linspace("p", *parse_grid(args.p_grid)))
    for spec in args.theta_grid or ():
        if "=" not in spec:
            raise UsageError(f"--theta-grid {spec!r} must look like theta1=lo:hi:n")
        name, grid = spec.split("=", 1)
        axes.append(analysis.Axis.linspace(name.strip(), *parse_grid(grid)))
    config = analysis.SweepConfig(
        representation=args.rep, metrics=tuple(metrics), axes=tuple(axes),
        profile=_profile(args), q=parse_number(args.q) if args.q is not None else 1.0,
        workers=int(args.workers or 1))
    result = analysis.sweep(config)
    _emit(result.to_json() if args.format == "json" else result.to_csv(), args.out)
    return EXIT_OK


def cmd_threshold(args) -> int:
    if not args.quantity:
        raise UsageError("threshold needs --quantity")
    name = analysis.canonical_metric(args.quantity)
    tol = parse_number(args.tol) if args.tol is not None else 1e-12
    q = parse_number(args.q) if args.q is not None else 1.0
    if args.angles is None and analysis.metric_angles(name):
        quantity = "concurrence" if name.startswith("C_") else "fidelity"
        pair = analysis.ROTATION if name == "F_rotation" else name[-3:-1]
        report = analysis.extremal_crossing(quantity, args.rep, pair, tol=max(tol, 1e-10), q=q)
        body = report.as_dict()
    else:
        angles = parse_floats(args.angles) if args.angles else []
        body = analysis.esd_threshold(args.rep, name, angles, tol=tol, q=q).as_dict()
    body["measurement_convention"] = analysis.MEASUREMENT_CONVENTION
    _emit(json.dumps(body, indent=1), args.out)
    return EXIT_OK


def cmd_table1(args) -> int:
    tb = parse_number(args.tol_bisect) if args.tol_bisect is not None else 1e-3
    te = parse_number(args.tol_extremal) if args.tol_extremal is not None else 5e-3
    report = analysis.table1_report(tb, te)
    print(report.format_text())
    if args.out:
        Path(args.out).write_text(json.dumps(report.as_dict(), indent=1), encoding="utf-8")
    return report.exit_code


def cmd_verify(args) -> int:
    path = args.golden or oracle.default_golden_path()
    try:
        results = oracle.verify_all(path, include_grid=not args.no_grid)
    except (OSError, ValueError, KeyError) as e:
        print(f"verify: cannot use golden file: {e}", file=sys.stderr)
        return EXIT_FAIL
    ok = True
    for d in results:
        good = d.ok()
        ok &= good
        print(f"{'ok  ' if good else 'FAIL'} {d.name:<12} samples {d.samples:>6}  "
              f"max|numeric-closed| {d.max_dev:.2e}  golden {d.golden_dev:.2e}")
    print(f"{'all' if ok else 'not all'} closed forms within {oracle.ORACLE_TOL:g}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> _Parser:
    parser = _Parser(prog="clusteresd", description="Dephased four-qubit cluster states: sweeps, "
                     "sudden-death thresholds and Table I.")
    parser.add_argument("--config", help="key=value file; command-line flags win")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("sweep", help="evaluate metrics on a grid")
    s.add_argument("--rep", choices=("c4", "c4h"))
    s.add_argument("--metric", action="append", help="N1, N12, N13, N14, witness, purity, "
                   "F_rotation, F_pair(jk), C_pair(jk); repeat or comma-separate")
    s.add_argument("--p-grid", help="lo:hi:n")
    s.add_argument("--theta-grid", action="append", help="thetaK=lo:hi:n (pi allowed)")
    s.add_argument("--profile", help="p1,p2,p3,p4")
    s.add_argument("--p", help="uniform strength")
    s.add_argument("--kappa")
    s.add_argument("--tau")
    s.add_argument("--schedule", help="base:dp:k1,k2,k3,k4")
    s.add_argument("--q", help="mixing weight of the initial state")
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("threshold", help="locate a sudden-death or fidelity-.5 point")
    t.add_argument("--quantity")
    t.add_argument("--rep", choices=("c4", "c4h"))
    t.add_argument("--angles", help="comma list; omit for pair quantities to search all angles")
    t.add_argument("--tol")
    t.add_argument("--q")
    t.add_argument("--out")
    t.set_defaults(func=cmd_threshold)

    b = sub.add_parser("table1", help="recompute Table I and compare with the quoted values")
    b.add_argument("--out", help="write the JSON report here")
    b.add_argument("--tol-bisect")
    b.add_argument("--tol-extremal")
    b.set_defaults(func=cmd_table1)

    v = sub.add_parser("verify", help="closed forms against the numeric pipeline and golden values")
    v.add_argument("--golden", help="golden-value CSV (default: the packaged one)")
    v.add_argument("--no-grid", action="store_true", default=None, help="random samples only")
    v.set_defaults(func=cmd_verify)
    return parser


_DEFAULTS = {"rep": "c4", "format": "csv"}


def _merge_config(parser, args, argv):
    if not args.config:
        return args
    tokens = read_config(args.config)
    file_args = parser.parse_args([args.command] + tokens)
    for key, value in vars(file_args).items():
        if getattr(args, key, None) is None and value is not None:
            setattr(args, key, value)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand (sweep, threshold, table1, verify)")
        args = _merge_config(parser, args, argv)
        for key, value in _DEFAULTS.items():
            if hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, value)
        return args.func(args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"clusteresd: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
