"""Bilinear algorithm container, tableau text format, built-in algorithms, census."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

from .laurent import LaurentPoly, ZERO, ONE, format_poly, parse_poly

Grid = tuple  # tuple of rows, each a tuple of LaurentPoly
TENSORS = ("gamma", "alpha", "beta")

_DECIMAL_RE = re.compile(r"(-?)(\d+)(?:\.(\d+))?")


class FormatError(ValueError):
    """Malformed tableau text. ``line`` is 1-based, or None when not tied to a line."""

    def __init__(self, message: str, line: int | None = None, kind: str = "format"):
        self.line = line
        self.kind = kind
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EncodingError(ValueError):
    """Polynomial cannot be written in the decimal encoding."""


@dataclass(frozen=True)
class BilinearAlgorithm:
    name: str
    n1: int
    n2: int
    n3: int
    gamma: tuple  # T grids, n1 x n3
    alpha: tuple  # T grids, n1 x n2
    beta: tuple   # T grids, n2 x n3

    def __post_init__(self):
        for d in (self.n1, self.n2, self.n3):
            if not isinstance(d, int) or d < 1:
                raise ValueError("dimensions must be positive integers")
        T = len(self.gamma)
        if T < 1 or len(self.alpha) != T or len(self.beta) != T:
            raise ValueError("gamma, alpha and beta must hold the same positive number of grids")
        for label, grids, (r, c) in zip(TENSORS, (self.gamma, self.alpha, self.beta), self.shapes()):
            for t, g in enumerate(grids):
                if len(g) != r or any(len(row) != c for row in g):
                    raise ValueError(f"{label} grid t={t + 1} is not {r}x{c}")

    @property
    def T(self) -> int:
        return len(self.gamma)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    @property
    def N1(self) -> int:
        return self.n1 * self.n3

    @property
    def N2(self) -> int:
        return self.n1 * self.n2

    @property
    def N3(self) -> int:
        return self.n2 * self.n3

    def shapes(self):
        """(rows, cols) of the gamma, alpha and beta grids."""
        return ((self.n1, self.n3), (self.n1, self.n2), (self.n2, self.n3))

    def tensor(self, label: str) -> tuple:
        return {"gamma": self.gamma, "alpha": self.alpha, "beta": self.beta}[label]

    def entries(self):
        """Yield (label, t, row, col, poly) with 0-based indices."""
        for label in TENSORS:
            for t, g in enumerate(self.tensor(label)):
                for r, row in enumerate(g):
                    for c, p in enumerate(row):
                        yield label, t, r, c, p

    def select(self, products: Sequence[int], name: str | None = None) -> "BilinearAlgorithm":
        """New algorithm made of the listed products (0-based, any order)."""
        return BilinearAlgorithm(
            name or self.name, self.n1, self.n2, self.n3,
            tuple(self.gamma[t] for t in products),
            tuple(self.alpha[t] for t in products),
            tuple(self.beta[t] for t in products),
        )

    def replace_entry(self, label: str, t: int, row: int, col: int, value: LaurentPoly) -> "BilinearAlgorithm":
        grids = list(self.tensor(label))
        g = [list(r) for r in grids[t]]
        g[row][col] = value
        grids[t] = _freeze(g)
        parts = {"gamma": self.gamma, "alpha": self.alpha, "beta": self.beta}
        parts[label] = tuple(grids)
        return BilinearAlgorithm(self.name, self.n1, self.n2, self.n3, **parts)


def _freeze(rows) -> Grid:
    return tuple(tuple(r) for r in rows)


def transpose_gamma(alg: BilinearAlgorithm) -> BilinearAlgorithm:
    """Swap rows and columns of every gamma grid (for tableaus that index C as c_{i2,i1})."""
    if alg.n1 != alg.n3:
        raise ValueError("transposing gamma requires n1 == n3")
    gamma = tuple(_freeze(zip(*g)) for g in alg.gamma)
    return BilinearAlgorithm(alg.name, alg.n1, alg.n2, alg.n3, gamma, alg.alpha, alg.beta)


# decimal-at-x=0.1 entries ---------------------------------------------------

def decode_decimal_entry(s: str) -> LaurentPoly:
    """Read a tableau value printed at x = 0.1, e.g. ``"10"`` -> x^-1, ``"0.11"`` -> x + x^2."""
    m = _DECIMAL_RE.fullmatch(s)
    if not m:
        raise ValueError(f"malformed decimal entry {s!r}")
    sign = -1 if m.group(1) else 1
    ipart, fpart = m.group(2), m.group(3) or ""
    terms = {}
    for k, ch in enumerate(reversed(ipart)):
        if ch not in "01":
            raise ValueError(f"digit {ch!r} in {s!r} is not representable (digits must be 0 or 1)")
        if ch == "1":
            terms[-k] = sign
    for j, ch in enumerate(fpart, start=1):
        if ch not in "01":
            raise ValueError(f"digit {ch!r} in {s!r} is not representable (digits must be 0 or 1)")
        if ch == "1":
            terms[j] = sign
    return LaurentPoly(terms)


def encode_decimal_entry(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    coeffs = set(c for _, c in p.items())
    if coeffs not in ({1}, {-1}):
        raise EncodingError(
            f"{format_poly(p)} is not decimal-encodable (needs one sign and unit coefficients); "
            "use the poly encoding")
    exps = [e for e, _ in p.items()]
    lo, hi = min(exps), max(exps)
    ilen = max(1, 1 - lo)
    idigits = ["0"] * ilen
    for e in exps:
        if e <= 0:
            idigits[ilen - 1 + e] = "1"
    out = "".join(idigits)
    if hi > 0:
        fdigits = ["0"] * hi
        for e in exps:
            if e > 0:
                fdigits[e - 1] = "1"
        out += "." + "".join(fdigits)
    return ("-" if -1 in coeffs else "") + out


def decimal_value_matches(s: str) -> bool:
    """True when eval(decode(s), 1/10) equals the decimal value of s exactly."""
    from fractions import Fraction
    from .laurent import eval_exact
    return eval_exact(decode_decimal_entry(s), Fraction(1, 10)) == Fraction(s)


# BILIN v1 text format ------------------------------------------------------

def _tokens(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if line:
            yield n, line


def parse_algorithm(text: str) -> BilinearAlgorithm:
    lines = list(_tokens(text))
    pos = 0

    def take(keyword: str, nargs: int | None):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise FormatError(f"expected '{keyword}', got end of file", last + 1, "header")
        n, toks = lines[pos]
        if toks[0] != keyword or (nargs is not None and len(toks) != nargs + 1):
            raise FormatError(f"expected '{keyword}' line, got {' '.join(toks)!r}", n, "header")
        pos += 1
        return n, toks[1:]

    _, (name,) = take("bilinear", 1)
    n, d = take("dims", 3)
    try:
        n1, n2, n3 = (int(v) for v in d)
    except ValueError:
        raise FormatError("dims must be integers", n, "header") from None
    if min(n1, n2, n3) < 1:
        raise FormatError("dims must be positive", n, "header")
    n, (tv,) = take("length", 1)
    if not tv.isdigit() or int(tv) < 1:
        raise FormatError("length must be a positive integer", n, "header")
    T = int(tv)
    n, (enc,) = take("encoding", 1)
    if enc not in ("decimal", "poly"):
        raise FormatError(f"unknown encoding {enc!r}", n, "header")
    decode = decode_decimal_entry if enc == "decimal" else parse_poly

    shapes = {"gamma": (n1, n3), "alpha": (n1, n2), "beta": (n2, n3)}
    blocks: dict[int, dict] = {}
    prev = 0
    while pos < len(lines):
        n, toks = lines[pos]
        if toks[0] != "t" or len(toks) != 2 or not toks[1].lstrip("-").isdigit():
            raise FormatError(f"expected 't <index>', got {' '.join(toks)!r}", n, "shape")
        idx = int(toks[1])
        if idx in blocks:
            raise FormatError(f"duplicate block t {idx}", n, "duplicate")
        if idx <= prev:
            raise FormatError(f"block t {idx} out of order (indices must increase)", n, "shape")
        if idx > T:
            raise FormatError(f"block t {idx} exceeds declared length {T}", n, "shape")
        prev = idx
        pos += 1
        grids = {}
        for label in TENSORS:
            r, c = shapes[label]
            take(label, 0)
            rows = []
            for _ in range(r):
                if pos >= len(lines) or lines[pos][1][0] in TENSORS + ("t",):
                    ln = lines[pos][0] if pos < len(lines) else lines[-1][0] + 1
                    raise FormatError(f"{label} grid of t {idx} has too few rows (want {r})", ln, "shape")
                ln, row = lines[pos]
                if len(row) != c:
                    raise FormatError(
                        f"{label} row of t {idx} has {len(row)} entries, want {c}", ln, "shape")
                vals = []
                for tok in row:
                    try:
                        vals.append(decode(tok))
                    except (ValueError, OverflowError) as exc:
                        raise FormatError(f"bad entry {tok!r}: {exc}", ln, "entry") from None
                rows.append(tuple(vals))
                pos += 1
            grids[label] = tuple(rows)
        blocks[idx] = grids
    missing = [k for k in range(1, T + 1) if k not in blocks]
    if missing:
        last = lines[-1][0] if lines else 0
        raise FormatError(
            f"missing block t {missing[0]} ({len(blocks)} of {T} blocks present)", last, "missing")
    order_ = range(1, T + 1)
    return BilinearAlgorithm(
        name, n1, n2, n3,
        tuple(blocks[k]["gamma"] for k in order_),
        tuple(blocks[k]["alpha"] for k in order_),
        tuple(blocks[k]["beta"] for k in order_),
    )


def serialize_algorithm(alg: BilinearAlgorithm, encoding: str = "decimal") -> str:
    if encoding not in ("decimal", "poly"):
        raise ValueError(f"unknown encoding {encoding!r}")
    out = [f"bilinear {alg.name}", f"dims {alg.n1} {alg.n2} {alg.n3}",
           f"length {alg.T}", f"encoding {encoding}"]
    for t in range(alg.T):
        out.append(f"t {t + 1}")
        for label in TENSORS:
            out.append(label)
            for r, row in enumerate(alg.tensor(label)[t]):
                cells = []
                for c, p in enumerate(row):
                    if encoding == "poly":
                        cells.append(format_poly(p))
                        continue
                    try:
                        cells.append(encode_decimal_entry(p))
                    except EncodingError as exc:
                        raise EncodingError(
                            f"{label} t={t + 1} row={r + 1} col={c + 1}: {exc}") from None
                out.append(" ".join(cells))
    return "\n".join(out) + "\n"


def load_algorithm(path) -> BilinearAlgorithm:
    with open(path, encoding="utf-8") as fh:
        return parse_algorithm(fh.read())


# built-ins -----------------------------------------------------------------

_CLASSICAL_RE = re.compile(r"classical-(\d+)x(\d+)x(\d+)")
_DATA_FILES = {"smirnov-4x4x4-46": "smirnov-4x4x4-46.bilin"}


def classical(n1: int, n2: int, n3: int) -> BilinearAlgorithm:
    """Textbook algorithm: one product a[i][j]*b[j][k] per (i, j, k), in that loop order."""
    gamma, alpha, beta = [], [], []

    def unit(r, c, i, j):
        return _freeze([[ONE if (a, b) == (i, j) else ZERO for b in range(c)] for a in range(r)])

    for i in range(n1):
        for j in range(n2):
            for k in range(n3):
                gamma.append(unit(n1, n3, i, k))
                alpha.append(unit(n1, n2, i, j))
                beta.append(unit(n2, n3, j, k))
    return BilinearAlgorithm(f"classical-{n1}x{n2}x{n3}", n1, n2, n3,
                             tuple(gamma), tuple(alpha), tuple(beta))


def strassen() -> BilinearAlgorithm:
    # rows: (alpha [a11 a12 a21 a22], beta [b11 b12 b21 b22], gamma [c11 c12 c21 c22])
    table = [
        ((1, 0, 0, 1), (1, 0, 0, 1), (1, 0, 0, 1)),
        ((0, 0, 1, 1), (1, 0, 0, 0), (0, 0, 1, -1)),
        ((1, 0, 0, 0), (0, 1, 0, -1), (0, 1, 0, 1)),
        ((0, 0, 0, 1), (-1, 0, 1, 0), (1, 0, 1, 0)),
        ((1, 1, 0, 0), (0, 0, 0, 1), (-1, 1, 0, 0)),
        ((-1, 0, 1, 0), (1, 1, 0, 0), (0, 0, 0, 1)),
        ((0, 1, 0, -1), (0, 0, 1, 1), (1, 0, 0, 0)),
    ]

    def grid(v):
        return _freeze([[LaurentPoly({0: v[0]}), LaurentPoly({0: v[1]})],
                        [LaurentPoly({0: v[2]}), LaurentPoly({0: v[3]})]])

    return BilinearAlgorithm(
        "strassen-2x2x2", 2, 2, 2,
        tuple(grid(g) for _, _, g in table),
        tuple(grid(a) for a, _, _ in table),
        tuple(grid(b) for _, b, _ in table),
    )


def builtin_names() -> list[str]:
    return ["classical-<n1>x<n2>x<n3>", "strassen-2x2x2", *_DATA_FILES]


def builtin(name: str) -> BilinearAlgorithm:
    m = _CLASSICAL_RE.fullmatch(name)
    if m:
        n1, n2, n3 = (int(g) for g in m.groups())
        if min(n1, n2, n3) < 1:
            raise KeyError(name)
        return classical(n1, n2, n3)
    if name == "strassen-2x2x2":
        return strassen()
    if name in _DATA_FILES:
        text = resources.files("apamm.data").joinpath(_DATA_FILES[name]).read_text("utf-8")
        return parse_algorithm(text)
    raise KeyError(f"unknown built-in algorithm {name!r}")


def builtin_text(name: str) -> str:
    """Raw text of a shipped data file."""
    return resources.files("apamm.data").joinpath(_DATA_FILES[name]).read_text("utf-8")


# census --------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientCensus:
    total_slots: int
    nonzero: int
    monomials: int
    multi_term: list = field(default_factory=list)  # (label, t, row, col, poly), 1-based
    exponent_histogram: dict = field(default_factory=dict)
    order_span: int = 0

    def to_dict(self) -> dict:
        return {
            "total_slots": self.total_slots,
            "nonzero": self.nonzero,
            "monomials": self.monomials,
            "multi_term": [
                {"tensor": lab, "t": t, "row": r, "col": c, "poly": format_poly(p)}
                for lab, t, r, c, p in self.multi_term
            ],
            "exponent_histogram": {str(e): n for e, n in sorted(self.exponent_histogram.items())},
            "order_span": self.order_span,
        }


def census(alg: BilinearAlgorithm) -> CoefficientCensus:
    total = nonzero = monomials = 0
    multi = []
    hist: Counter = Counter()
    for label, t, r, c, p in alg.entries():
        total += 1
        if p.is_zero():
            continue
        nonzero += 1
        if len(p) == 1:
            monomials += 1
        else:
            multi.append((label, t + 1, r + 1, c + 1, p))
        for e, _ in p.items():
            hist[e] += 1
    span = max(hist) - min(hist) if hist else 0
    return CoefficientCensus(total, nonzero, monomials, multi, dict(sorted(hist.items())), span)
