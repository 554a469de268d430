"""Command-line front end: ``hilbzeta {expand,verify,recognize,chseries}``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import hilbert
from .fock import FockSpace, FrobeniusRing, g2_operator, trace_q_W, w_operator
from .hilbert import SurfacePairings, goettsche_series
from .qzeta import QZetaCombination, RecognitionFailure, bracket, eisenstein, okounkov_z, qm_recognize, qzeta_eval
from .series import PowerSeries, as_fraction, euler_product, format_fraction
from .verify import run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3

MAX_DEPTH = 6

IDENTIFIERS = """series identifiers for `expand`:
  Z:s1,...,sl      Okounkov multiple q-zeta value, entries >= 2
  bracket:s1,...   Bachmann-Kuehn bracket, entries >= 1
  G:2k             Eisenstein series G_2k
  theta2           -(1/3) T_111 + (1/4) T_22
  S_n2 S_2n1 S_ij T_111 T_22 E_mix NM D1
                   nested sum families
  euler            (q;q)_infinity
  goettsche:chi    (q;q)_infinity^(-chi)
  ch1 ch2          reduced Chern character series (needs --surface)
"""


class UsageError(Exception):
    pass


class ParseError(Exception):
    pass


# ---------------------------------------------------------------------------
# rendering

def render_series(series: PowerSeries, fmt: str, name: str = "") -> str:
    if fmt == "json":
        return series.to_json()
    if fmt == "csv":
        return series.to_csv().rstrip("\n")
    rows = [f"{k}\t{format_fraction(c)}" for k, c in enumerate(series) if c]
    header = f"# {name} to order {series.order}" if name else f"# order {series.order}"
    return "\n".join([header, "k\tcoefficient"] + rows)


def _entries(text: str, minimum: int) -> tuple[int, ...]:
    try:
        entries = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"bad entry list {text!r}") from None
    if not entries or any(e < minimum for e in entries):
        raise UsageError(f"entries must be integers >= {minimum}")
    return entries


def expand_identifier(name: str, order: int, surface: SurfacePairings | None = None) -> PowerSeries:
    head, _, arg = name.partition(":")
    if head == "Z" and arg:
        return okounkov_z(_entries(arg, 2), order)
    if head == "bracket" and arg:
        return bracket(_entries(arg, 1), order)
    if head == "G" and arg:
        (w,) = _entries(arg, 2)
        if w % 2:
            raise UsageError("Eisenstein weight must be even")
        return eisenstein(w, order)
    if head == "goettsche" and arg:
        try:
            return goettsche_series(int(arg), order)
        except ValueError:
            raise UsageError(f"bad Euler characteristic {arg!r}") from None
    if name == "euler":
        return euler_product(order)
    if name == "theta2":
        return hilbert.theta2(order)
    if name in hilbert.SUM_FAMILIES:
        return hilbert.sum_family(name, order)
    if name in ("ch1", "ch2"):
        if surface is None:
            raise UsageError(f"{name} needs --surface")
        return qzeta_eval(chern_series(name, surface), order)
    raise UsageError(f"unknown series identifier {name!r}\n{IDENTIFIERS}")


# ---------------------------------------------------------------------------
# input parsing

def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    path = Path(source)
    if path.exists():
        return path.read_text()
    if source.lstrip().startswith(("{", "[")):
        return source
    raise ParseError(f"no such file: {source}")


def parse_coefficients(text: str) -> PowerSeries:
    """A JSON array of rationals, or lines of "k num/den"."""
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty coefficient input")
    try:
        if stripped.startswith("["):
            return PowerSeries.from_json(stripped)
        values: dict[int, Fraction] = {}
        for lineno, line in enumerate(stripped.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'k value'")
            k = int(parts[0])
            if k in values:
                raise ParseError(f"line {lineno}: duplicate index {k}")
            values[k] = as_fraction(parts[1])
    except (ValueError, ZeroDivisionError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse coefficients: {exc}") from None
    if sorted(values) != list(range(len(values))):
        raise ParseError("coefficient indices must cover 0..N without gaps")
    return PowerSeries(tuple(values[k] for k in range(len(values))))


def load_surface(source: str) -> tuple[SurfacePairings, FrobeniusRing | None]:
    """Surface numbers from JSON; a ring description also yields the model ring."""
    try:
        data = json.loads(_read_text(source))
    except json.JSONDecodeError as exc:
        raise ParseError(f"surface JSON is malformed: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("surface JSON must be an object")
    try:
        if "intersection" in data:
            ring = FrobeniusRing.from_dict(data)
            return ring.surface(), ring
        return SurfacePairings.from_dict(data), None
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"invalid surface data: {exc}") from None


def chern_series(which: str, surface: SurfacePairings) -> QZetaCombination:
    try:
        return hilbert.ch1_reduced(surface) if which == "ch1" else hilbert.ch2_reduced(surface)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands

def cmd_expand(args) -> int:
    surface = load_surface(args.surface)[0] if args.surface else None
    series = expand_identifier(args.name, args.order, surface)
    print(render_series(series, args.format, args.name))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.order, args.depth)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        print(json.dumps([{"name": r.name, "suite": r.suite, "passed": r.passed,
                           "index": r.index, "detail": r.detail} for r in results], indent=2))
    else:
        for r in results:
            print(r.line())
        print(f"{len(results) - len(failed)}/{len(results)} identities hold")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_recognize(args) -> int:
    series = parse_coefficients(_read_text(args.input))
    try:
        expr = qm_recognize(series, args.weight, args.fit)
    except ValueError as exc:
        raise ParseError(f"insufficient data: {exc}") from None
    except RecognitionFailure as exc:
        report = {"recognized": False, "reason": str(exc), "index": exc.index, "ambiguous": exc.ambiguous}
        print(json.dumps(report) if args.format == "json" else f"not recognized: {exc}")
        return EXIT_FAILED
    if args.format == "json":
        print(expr.to_json())
    else:
        print(expr)
        print(expr.to_json())
    return EXIT_OK


def oracle_check(ring: FrobeniusRing, which: str, depth: int) -> tuple[bool, int | None, str]:
    """Compare the Fock-space trace of W G_2(1_X) with the closed form.

    Only the 1_X part of the second Chern character is available as an
    explicit operator, so the check covers that summand; the L-dependent
    summands come from first-order series the oracle does not model.
    """
    if which != "ch2":
        return True, None, "no operator for the first Chern character; oracle check not applicable"
    space = FockSpace(ring, depth)
    trace = trace_q_W(space, g2_operator(space, ring.unit), w_operator(space))
    expected = goettsche_series(ring.chi, depth) * qzeta_eval(
        hilbert.f2_reduced_symbolic(ring.pairings(ring.unit)), depth)
    k = trace.first_mismatch(expected)
    return k is None, k, f"Tr q^n W G_2(1_X) on {ring.name} to q^{depth}"


def cmd_chseries(args) -> int:
    if not args.surface:
        raise UsageError("chseries needs --surface")
    surface, ring = load_surface(args.surface)
    combo = chern_series(args.which, surface)
    series = qzeta_eval(combo, args.order)
    if args.format == "json":
        print(json.dumps({"symbolic": combo.to_dict(), "expansion": json.loads(series.to_json())}))
    elif args.format == "csv":
        print(series.to_csv().rstrip("\n"))
    else:
        print(f"{args.which} = {combo}")
        print(render_series(series, "table", args.which))
    if args.oracle:
        if ring is None:
            raise UsageError("--oracle needs a ring description (r, intersection, K, L) as --surface")
        ok, k, note = oracle_check(ring, args.which, args.depth)
        where = "" if k is None else f" (first mismatch at q^{k})"
        print(f"oracle: {'PASS' if ok else 'FAIL'}{where} - {note}", file=sys.stderr)
        if not ok:
            return EXIT_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------

def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilbzeta",
        description="Exact q-series for multiple q-zeta values and Hilbert schemes of points.",
        epilog="Exit codes: 0 success, 1 verification failure, 2 usage error, 3 parse error.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_order):
        p.add_argument("--order", "-N", type=_positive, default=default_order, help="truncation order")
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.add_argument("--depth", type=_positive, default=5, help="Fock oracle depth (max 6 unless --allow-deep)")
        p.add_argument("--allow-deep", action="store_true", help="permit oracle depth above 6")
        p.add_argument("--surface", help="surface JSON file or inline JSON")

    p = sub.add_parser("expand", help="expand a named series", epilog=IDENTIFIERS,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("name")
    common(p, 30)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", help="run the identity suites")
    p.add_argument("--suite", choices=("qzeta", "hilbert", "oracle", "all"), default="all")
    common(p, 30)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("recognize", help="recognize coefficients as a quasimodular form",
                       epilog="Input: JSON array of rationals or lines 'k num/den'; '-' reads stdin.")
    p.add_argument("input")
    p.add_argument("--weight", type=_positive, default=4, help="weight bound")
    p.add_argument("--fit", type=_positive, default=None, help="coefficients used for fitting")
    common(p, 60)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("chseries", help="reduced Chern character series of a surface",
                       epilog='Surface JSON: {"chi","K2","KL","L2"} or a ring {"r","intersection","K","L"}.')
    p.add_argument("which", choices=("ch1", "ch2"))
    p.add_argument("--oracle", action="store_true", help="cross-check against the Fock-space oracle")
    common(p, 30)
    p.set_defaults(func=cmd_chseries)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.depth > MAX_DEPTH and not args.allow_deep:
        print(f"error: oracle depth above {MAX_DEPTH} needs --allow-deep", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
