"""Command-line entry point: ``bmorse <subcommand> ...``.

Rationals cross the command line as ``p/q`` strings.  Exit status is 0 on
success, 1 when a verification fails and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from bmorse.bmfunction import f_eval, fn_eval
from bmorse.discontinuum import KMODES, build_staircase
from bmorse.numerics import fmt, parse_rational
from bmorse.plmap import PLMap, build_g, verify_measure
from bmorse.probes import dini_scan, morse_report
from bmorse.svg import polyline_svg

log = logging.getLogger("bmorse")


@dataclass
class Config:
    sigma: int = 1
    kmode: str = "exact"
    depth: int = 8
    cutoff: int = 3
    max_gen: int = 6
    eps: Fraction = Fraction(1, 2**20)
    outputs: dict[str, Path] = field(default_factory=dict)


DEFAULTS = Config()


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _unit(text: str) -> Fraction:
    q = _rational(text)
    if not 0 <= q <= 1:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return q


def _positive_rational(text: str) -> Fraction:
    q = _rational(text)
    if q <= 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return q


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if n < 1:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return n


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
        log.info("wrote %s", path)


def _decimal(q: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def cmd_build_staircase(args) -> int:
    tree = build_staircase(args.sigma, args.depth, args.kmode)
    _write(args.out, tree.dumps() + "\n")
    return 0


def cmd_eval(args) -> int:
    if args.n is None:
        enc = f_eval(args.x, args.eps, kmode=args.kmode)
    else:
        enc = fn_eval(args.x, args.n, args.eps, kmode=args.kmode)
    print(f"{fmt(enc.lo)} {fmt(enc.hi)}")
    return 0


def cmd_sample(args) -> int:
    if args.count < 2:
        raise ValueError("--count must be at least 2")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "lo", "hi"] + (["decimal"] if args.decimals else []))
    for i in range(args.count):
        x = Fraction(i, args.count - 1)
        enc = f_eval(x, args.eps, kmode=args.kmode)
        row = [fmt(x), fmt(enc.lo), fmt(enc.hi)]
        if args.decimals:
            row.append(_decimal(enc.mid, args.decimals))
        w.writerow(row)
    _write(args.out, buf.getvalue())
    return 0


def cmd_build_g(args) -> int:
    g = build_g(args.gen, args.cutoff, args.kmode)
    _write(args.out, g.dumps() + "\n")
    return 0


def cmd_verify_measure(args) -> int:
    g = PLMap.from_json(json.loads(Path(args.input).read_text()))
    report = verify_measure(g)
    _write(args.out, json.dumps(report.to_json(), indent=1) + "\n")
    if not report.preserving:
        for line in report.diagnostics:
            print(f"verify-measure: {line}", file=sys.stderr)
        return 1
    return 0


def _scales(args) -> list[Fraction]:
    if args.scales:
        return args.scales
    return [Fraction(1, 2**k) for k in range(2, 25, 2)]


def cmd_dini(args) -> int:
    scan = dini_scan(args.x, args.side, _scales(args), args.samples, kmode=args.kmode)
    _write(args.out, scan.to_csv())
    return 0


def cmd_morse(args) -> int:
    report = morse_report(args.points, _scales(args), args.threshold, args.samples, kmode=args.kmode)
    _write(args.out, json.dumps(report, indent=1) + "\n")
    return 0


def cmd_plot(args) -> int:
    src = Path(args.input)
    text = src.read_text()
    if src.suffix == ".csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        points = [
            (parse_rational(r["x"]), (parse_rational(r["lo"]) + parse_rational(r["hi"])) / 2) for r in rows
        ]
    else:
        g = PLMap.from_json(json.loads(text))
        points = list(zip(g.breakpoints, g.values))
    _write(args.out, polyline_svg(points))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kmode", choices=KMODES, default=DEFAULTS.kmode)
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")

    p = argparse.ArgumentParser(prog="bmorse", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build-staircase", parents=[common], help="dump a staircase tree as JSON")
    s.add_argument("--sigma", type=_positive_int, default=DEFAULTS.sigma)
    s.add_argument("--depth", type=_positive_int, default=DEFAULTS.depth)
    s.set_defaults(func=cmd_build_staircase)

    s = sub.add_parser("eval", parents=[common], help="certified enclosure of f(x)")
    s.add_argument("--x", type=_unit, required=True)
    s.add_argument("--eps", type=_positive_rational, default=DEFAULTS.eps)
    s.add_argument("--n", type=int, default=None, help="evaluate the approximant f_n instead")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sample", parents=[common], help="enclosures of f on a uniform rational grid")
    s.add_argument("--count", type=_positive_int, default=257)
    s.add_argument("--eps", type=_positive_rational, default=DEFAULTS.eps)
    s.add_argument("--decimals", type=_positive_int, default=None, help="add a decimal column with this precision")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("build-g", parents=[common], help="build a measure-preserving approximant")
    s.add_argument("--gen", type=int, default=1)
    s.add_argument("--cutoff", type=_positive_int, default=DEFAULTS.cutoff)
    s.set_defaults(func=cmd_build_g)

    s = sub.add_parser("verify-measure", parents=[common], help="exact slope-sum check of a map file")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_verify_measure)

    s = sub.add_parser("dini", parents=[common], help="one-sided difference-quotient scan")
    s.add_argument("--x", type=_unit, required=True)
    s.add_argument("--side", choices=("left", "right"), required=True)
    s.add_argument("--scales", type=_positive_rational, nargs="+")
    s.add_argument("--samples", type=_positive_int, default=16)
    s.set_defaults(func=cmd_dini)

    s = sub.add_parser("morse", parents=[common], help="finite-scale Morse evidence at several points")
    s.add_argument("--points", type=_unit, nargs="+", required=True)
    s.add_argument("--threshold", type=_positive_rational, default=Fraction(100))
    s.add_argument("--scales", type=_positive_rational, nargs="+")
    s.add_argument("--samples", type=_positive_int, default=16)
    s.set_defaults(func=cmd_morse)

    s = sub.add_parser("plot", parents=[common], help="SVG graph of a map JSON or sample CSV")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_plot)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        parser.error(str(exc))
