"""Command-line front end.

Subcommands: revenue, constants, table, figure, verify. Machine output
(JSON on stdout or CSV/JSON files) prints numbers at 12 significant digits;
short human summaries go to stderr at 4.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

from .analysis import build_table, constants, figure_data
from .distcore import DEFAULT_CAP, DiscreteDistribution
from .errors import CapacityError, DegenerateDistributionError, DomainError
from .revenue import brev, myerson_price
from .verifier import CHECK_ORDER, LOWER_BOUND_TOL, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3

TABLE_HEADER = ["d", "c_low", "c_high", "ratio_low", "ratio_high"]
FIGURE_HEADER = ["c", "d", "ratio"]


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    tol: float = LOWER_BOUND_TOL
    step: float = 1e-3
    cap: int = DEFAULT_CAP
    seed: int = 42
    out: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("tol: must be positive")
        if not self.step > 0:
            raise InputError("step: must be positive")
        if self.cap < 1000:
            raise InputError("cap: must be at least 1000")


def fmt_num(x: float) -> str:
    return format(x, ".12g")


def machine(value):
    """Round floats to 12 significant digits, recursively, for JSON output."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(fmt_num(value))
    if isinstance(value, dict):
        return {str(k): machine(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [machine(v) for v in value]
    try:  # numpy scalars
        return machine(value.item())
    except AttributeError:
        return str(value)


def dumps(obj) -> str:
    return json.dumps(machine(obj), indent=2) + "\n"


def load_distribution(path: str) -> DiscreteDistribution:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"dist: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"dist: invalid JSON in {path}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError("dist: top level must be an object with support and probs")
    for key in ("support", "probs"):
        if key not in data:
            raise InputError(f"{key}: missing")
        if not isinstance(data[key], list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in data[key]
        ):
            raise InputError(f"{key}: must be an array of numbers")
    if len(data["support"]) != len(data["probs"]):
        raise InputError(
            f"probs: length {len(data['probs'])} does not match "
            f"support length {len(data['support'])}"
        )
    try:
        return DiscreteDistribution(data["support"], data["probs"])
    except DomainError as exc:
        raise InputError(str(exc)) from exc


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_revenue(args, cfg: RunConfig) -> int:
    dist = load_distribution(args.dist)
    if args.k < 1:
        raise InputError("k: must be >= 1")
    single = myerson_price(dist)
    result = brev(dist, args.k, cap=cfg.cap)
    report = {
        "k": args.k,
        "myerson_price": single.price,
        "sale_probability": single.sale_probability,
        "rev": single.revenue,
        "srev": result.srev,
        "brev": result.brev,
        "bundle_price": result.bundle_price,
        "ratio": result.ratio,
    }
    _emit(dumps(report), cfg.out)
    return EXIT_OK


def cmd_constants(args, cfg: RunConfig) -> int:
    cert = constants()
    _emit(dumps({"c_star": cert.c_star, "r_star": cert.r_star, "residual": cert.residual}), cfg.out)
    return EXIT_OK


def table_rows(c_max: float):
    return [
        [str(s.d), fmt_num(s.c_low), fmt_num(s.c_high), fmt_num(s.ratio_low), fmt_num(s.ratio_high)]
        for s in build_table(c_max)
    ]


def cmd_table(args, cfg: RunConfig) -> int:
    if not args.c_max > 1:
        raise InputError("c-max: must exceed 1")
    if cfg.fmt == "csv":
        text = _csv(TABLE_HEADER, table_rows(args.c_max))
    else:
        segments = [
            {"d": s.d, "c_low": s.c_low, "c_high": s.c_high,
             "ratio_low": s.ratio_low, "ratio_high": s.ratio_high}
            for s in build_table(args.c_max)
        ]
        text = dumps(segments)
    _emit(text, cfg.out)
    return EXIT_OK


def figure_grid(c_min: float, c_max: float, step: float):
    n = int(math.floor((c_max - c_min) / step + 1e-9)) + 1
    return [float(fmt_num(c_min + i * step)) for i in range(n)]


def cmd_figure(args, cfg: RunConfig) -> int:
    if args.d_max < 1:
        raise InputError("d-max: must be >= 1")
    if not 0 < args.c_min <= args.c_max:
        raise InputError("c-min: need 0 < c-min <= c-max")
    rows = figure_data(args.d_max, figure_grid(args.c_min, args.c_max, cfg.step))
    text = _csv(FIGURE_HEADER, [[fmt_num(c), str(d), fmt_num(r)] for c, d, r in rows])
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    names = None if args.suite == "all" else [args.suite]
    report = run_suite(
        names, seed=cfg.seed, trials=args.trials, step=cfg.step, tol=cfg.tol, cap=cfg.cap
    )
    payload = {
        "suite": args.suite,
        "seed": cfg.seed,
        "all_passed": report.all_passed,
        "checks": [
            {"name": c.name, "passed": c.passed, "margin": c.margin,
             "details": c.details, "data": c.data}
            for c in report.checks
        ],
    }
    _emit(dumps(payload), cfg.out)
    for c in report.checks:
        print(f"{c.name:10s} {'PASS' if c.passed else 'FAIL'}  margin={c.margin:.4g}",
              file=sys.stderr)
    return EXIT_OK if report.all_passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bundlerev",
        description="Bundle vs separate posted-price revenue, and checks of the 55.9% bound.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, step_default=1e-3):
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="convolution support cap")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--tol", type=float, default=LOWER_BOUND_TOL)
        p.add_argument("--step", type=float, default=step_default)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    p = sub.add_parser("revenue", help="Rev, SRev, BRev and their ratio for a distribution file")
    p.add_argument("--dist", required=True, help='JSON file {"support": [...], "probs": [...]}')
    p.add_argument("--k", type=int, required=True, help="number of items")
    common(p)
    p.set_defaults(func=cmd_revenue)

    p = sub.add_parser("constants", help="c_star, r_star and the root residual")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("table", help="pricing segments for c up to --c-max")
    p.add_argument("--c-max", type=float, default=40.0)
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("figure", help="long-format d*h_d(c)/c curves")
    p.add_argument("--d-max", type=int, default=8)
    p.add_argument("--c-min", type=float, default=0.01)
    p.add_argument("--c-max", type=float, default=12.0)
    common(p, step_default=0.01)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="run the numerical checks")
    p.add_argument("suite", nargs="?", default="all", choices=("all",) + CHECK_ORDER)
    p.add_argument("--trials", type=int, default=200, help="random distributions for 'reduction'")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(tol=args.tol, step=args.step, cap=args.cap,
                        seed=args.seed, out=args.out, fmt=args.fmt)
        return args.func(args, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateDistributionError as exc:
        print(f"error: probs: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
