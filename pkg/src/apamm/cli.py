"""Command-line interface: ``apamm <command> ...``.

Exit codes: 0 ok, 1 algorithm invalid or not encodable, 2 input parse error, 3 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import analysis
from .executor import (MultCounter, ShapeError, classical_product, format_matrix_csv,
                       multiply_recursive, read_matrix_csv)
from .model import (EncodingError, FormatError, builtin, census, load_algorithm,
                    serialize_algorithm, transpose_gamma)
from .laurent import format_poly
from .verify import format_objective, verify

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _num(v: float) -> str:
    return f"{v:.17g}"


def _load(spec: str):
    """Load a tableau file, or a built-in when no such file exists."""
    if os.path.exists(spec):
        try:
            return load_algorithm(spec)
        except FormatError as exc:
            raise InputError(f"{spec}: {exc}") from None
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"{spec}: {exc}") from None
    try:
        return builtin(spec)
    except KeyError:
        raise InputError(f"{spec}: no such file or built-in algorithm") from None


def _read_matrix(path, exact):
    try:
        return read_matrix_csv(path, exact=exact)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _has_x(alg) -> bool:
    return any(p and any(e != 0 for e, _ in p.items()) for *_, p in alg.entries())


# commands ------------------------------------------------------------------

def cmd_verify(args) -> int:
    alg = _load(args.algorithm)
    rep = verify(alg, keep_residuals=args.dump_residuals)
    ok = rep.is_exact if args.exact else rep.is_apa_valid
    if args.json:
        doc = rep.to_dict(full_objective=args.full)
        doc["algorithm"] = {"name": alg.name, "dims": list(alg.dims), "T": alg.T}
        if args.dump_residuals:
            doc["residuals"] = [[list(ix), format_poly(r)] for ix, r in rep.residuals.items()]
        print(json.dumps(doc, indent=2))
        return EXIT_OK if ok else EXIT_INVALID
    mro = rep.min_residual_order
    print(f"algorithm {alg.name} dims {alg.n1}x{alg.n2}x{alg.n3} T {alg.T}")
    print(f"exact {'yes' if rep.is_exact else 'no'}")
    print(f"apa-valid {'yes' if rep.is_apa_valid else 'no'}")
    print(f"min residual order {'inf' if mro == math.inf else mro}")
    print(f"nonzero residuals {rep.residual_count_nonzero} / {rep.residual_count_total}")
    if rep.worst_indices:
        shown = rep.worst_indices[:5]
        more = len(rep.worst_indices) - len(shown)
        txt = " ".join("(" + ",".join(map(str, ix)) + ")" for ix in shown)
        print(f"worst indices (i1,i2,j1,j2,k1,k2) {txt}" + (f" and {more} more" if more else ""))
    print(f"S {format_objective(rep.objective, None if args.full else 8)}")
    if args.dump_residuals:
        for ix, r in rep.residuals.items():
            print("residual " + ",".join(map(str, ix)) + " " + format_poly(r))
    return EXIT_OK if ok else EXIT_INVALID


def cmd_stats(args) -> int:
    alg = _load(args.algorithm)
    c = census(alg)
    if args.json:
        doc = {"schema_version": 1, "name": alg.name, "dims": list(alg.dims), "T": alg.T}
        doc.update(c.to_dict())
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"algorithm {alg.name}")
    print(f"dims {alg.n1} {alg.n2} {alg.n3}")
    print(f"T {alg.T}")
    print(f"nonzero {c.nonzero} / {c.total_slots}")
    print(f"monomials {c.monomials}")
    print(f"multi-term {len(c.multi_term)}")
    print(f"order span {c.order_span}")
    print("exponents " + " ".join(f"{e}:{n}" for e, n in c.exponent_histogram.items()))
    for lab, t, r, col, p in c.multi_term:
        print(f"multi-term {lab} t={t} row={r} col={col} {format_poly(p)}")
    return EXIT_OK


def cmd_multiply(args) -> int:
    alg = _load(args.algorithm)
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    if args.x is None:
        if _has_x(alg):
            raise UsageError(f"{alg.name} has x-dependent coefficients; pass --x")
        x = Fraction(1) if args.exact else 1.0
    else:
        try:
            x = Fraction(args.x) if args.exact else float(args.x)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad --x value {args.x!r}") from None
    if x == 0 and _has_x(alg):
        raise UsageError("--x must be nonzero for this algorithm")
    A = _read_matrix(args.a, args.exact)
    B = _read_matrix(args.b, args.exact)
    counter = MultCounter()
    try:
        C = multiply_recursive(alg, A, B, x, levels=args.levels, pad=args.pad,
                               counter=counter, exact=args.exact)
    except ShapeError as exc:
        raise UsageError(str(exc)) from None
    text = format_matrix_csv(C)
    info = sys.stderr
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        info = sys.stdout
    else:
        sys.stdout.write(text)
    if args.compare:
        ref = classical_product(A, B, exact=args.exact)
        if args.exact:
            diff = np.array(C - ref, dtype=object)
            num = math.sqrt(float(sum(v * v for v in diff.ravel())))
            den = math.sqrt(float(sum(v * v for v in ref.ravel())))
            err = num / max(den, analysis.EPS)
        else:
            err = analysis.relative_error(C, ref)
        print(f"relative_error {_num(err)}", file=info)
        print(f"digits {_num(analysis.digits_of_precision(err))}", file=info)
    if args.counts:
        mults, adds = analysis.op_counts(alg, args.levels)
        print(f"multiplications {counter.count}", file=info)
        print(f"naive_additions {adds}", file=info)
    return EXIT_OK


def cmd_sweep(args) -> int:
    alg = _load(args.algorithm)
    if not (args.xmin > 0 and args.xmax > 0) or args.xmin > args.xmax:
        raise UsageError("need 0 < xmin <= xmax")
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    grid = analysis.logspace_grid(args.xmin, args.xmax, args.points)
    res = analysis.sweep(alg, levels=args.levels, x_grid=grid, seed=args.seed)
    if args.csv:
        if args.csv == "-":
            sys.stdout.write(res.to_csv())
            return EXIT_OK
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(res.to_csv())
    if args.json:
        print(json.dumps({"schema_version": 1, "algorithm": alg.name, **res.to_dict()}, indent=2))
        return EXIT_OK
    print(f"{'x':>24} {'relative_error':>24} {'digits':>24}")
    for x, e, d in res.rows():
        print(f"{_num(x):>24} {_num(e):>24} {_num(d):>24}")
    print(f"optimal_x {_num(res.optimal_x)}")
    print(f"optimal_error {_num(res.optimal_error)}")
    print(f"optimal_digits {_num(analysis.digits_of_precision(res.optimal_error))}")
    return EXIT_OK


def cmd_convert(args) -> int:
    alg = _load(args.algorithm)
    if args.transpose_gamma:
        try:
            alg = transpose_gamma(alg)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        text = serialize_algorithm(alg, args.encoding)
    except EncodingError as exc:
        print(f"apamm: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_counts(args) -> int:
    alg = _load(args.algorithm)
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    mults, adds = analysis.op_counts(alg, args.levels)
    n1, n2, n3 = alg.dims
    classical = (n1 * n2 * n3) ** args.levels
    print(f"levels {args.levels}")
    print(f"multiplications {mults}")
    print(f"naive_additions {adds}")
    print(f"classical_multiplications {classical}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="apamm", description="Verify, inspect and run approximate bilinear "
                "matrix multiplication algorithms.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def alg_arg(sp):
        sp.add_argument("algorithm", help="tableau file or built-in name "
                        "(classical-NxMxK, strassen-2x2x2, smirnov-4x4x4-46)")

    v = sub.add_parser("verify", help="check Brent's equations and print the objective S")
    alg_arg(v)
    v.add_argument("--json", action="store_true")
    v.add_argument("--exact", action="store_true", help="succeed only for exact algorithms")
    v.add_argument("--full", action="store_true", help="show all of S, not just terms below x^8")
    v.add_argument("--dump-residuals", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="coefficient census")
    alg_arg(s)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_stats)

    m = sub.add_parser("multiply", help="multiply two CSV matrices")
    alg_arg(m)
    m.add_argument("--a", required=True)
    m.add_argument("--b", required=True)
    m.add_argument("--x", default=None, help="value of x (p/q allowed with --exact)")
    m.add_argument("--levels", type=int, default=1)
    m.add_argument("--pad", action="store_true")
    m.add_argument("--exact", action="store_true", help="rational arithmetic")
    m.add_argument("--compare", action="store_true")
    m.add_argument("--counts", action="store_true")
    m.add_argument("-o", "--output")
    m.set_defaults(func=cmd_multiply)

    w = sub.add_parser("sweep", help="relative error over a log grid of x")
    alg_arg(w)
    w.add_argument("--xmin", type=float, default=1e-7)
    w.add_argument("--xmax", type=float, default=1e-2)
    w.add_argument("--points", type=int, default=25)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--levels", type=int, default=1)
    w.add_argument("--csv", help="write the curve as CSV ('-' for stdout)")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("convert", help="rewrite a tableau in canonical form")
    alg_arg(c)
    c.add_argument("--encoding", choices=("decimal", "poly"), required=True)
    c.add_argument("-o", "--output")
    c.add_argument("--transpose-gamma", action="store_true")
    c.set_defaults(func=cmd_convert)

    k = sub.add_parser("counts", help="naive operation counts")
    alg_arg(k)
    k.add_argument("--levels", type=int, default=1)
    k.set_defaults(func=cmd_counts)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"apamm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"apamm: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
