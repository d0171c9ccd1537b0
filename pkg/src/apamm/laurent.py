"""Sparse Laurent polynomials in one variable with exact integer coefficients."""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping

# Coefficients are Python ints, which never wrap. The bound below turns
# runaway growth into an explicit error instead of silently huge numbers.
COEFF_LIMIT = 2**63 - 1

_TERM_RE = re.compile(r"([+-]?)(\d*)(x(?:\^(-?\d+))?)?")


def _check(c: int) -> int:
    if c > COEFF_LIMIT or c < -COEFF_LIMIT:
        raise OverflowError(f"coefficient {c} exceeds the 64-bit limit")
    return c


class LaurentPoly:
    """Immutable map exponent -> nonzero integer coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        clean = {}
        if terms:
            for e, c in terms.items():
                if not isinstance(e, int) or not isinstance(c, int):
                    raise TypeError("exponents and coefficients must be int")
                if c:
                    clean[e] = _check(c)
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentPoly":
        p = cls.__new__(cls)
        p._terms = dict(sorted((e, c) for e, c in terms.items() if c))
        p._hash = None
        return p

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exponent: coeff})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def coeff(self, e: int) -> int:
        return self._terms.get(e, 0)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, int):
            return self._terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other):
        return add(self, _lift(other))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return add(self, -_lift(other))

    def __rsub__(self, other):
        return add(_lift(other), -self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = LaurentPoly({0: 1})
        for _ in range(k):
            out = mul(out, self)
        return out

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    def truncate(self, below: int) -> "LaurentPoly":
        """Keep only the terms with exponent < below."""
        return LaurentPoly._raw({e: c for e, c in self._terms.items() if e < below})

    def min_exponent(self):
        return order(self)

    def max_exponent(self):
        return max(self._terms) if self._terms else -math.inf


ZERO = LaurentPoly()
ONE = LaurentPoly({0: 1})
X = LaurentPoly({1: 1})


def _lift(v) -> LaurentPoly:
    if isinstance(v, LaurentPoly):
        return v
    if isinstance(v, int):
        return LaurentPoly({0: v})
    raise TypeError(f"cannot combine LaurentPoly with {type(v).__name__}")


def poly(terms: Iterable[tuple[int, int]] = ()) -> LaurentPoly:
    acc: dict[int, int] = {}
    for e, c in terms:
        acc[e] = _check(acc.get(e, 0) + c)
    return LaurentPoly(acc)


def add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if not q._terms:
        return p
    if not p._terms:
        return q
    acc = dict(p._terms)
    for e, c in q._terms.items():
        acc[e] = _check(acc.get(e, 0) + c)
    return LaurentPoly._raw(acc)


def mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if not p._terms or not q._terms:
        return ZERO
    acc: dict[int, int] = {}
    for e1, c1 in p._terms.items():
        for e2, c2 in q._terms.items():
            e = e1 + e2
            acc[e] = _check(acc.get(e, 0) + _check(c1 * c2))
    return LaurentPoly._raw(acc)


def order(p: LaurentPoly):
    """Lowest exponent, or +inf for the zero polynomial."""
    return next(iter(p._terms)) if p._terms else math.inf


def eval_poly(p: LaurentPoly, x: float) -> float:
    """Floating-point value at x, summed in ascending exponent order."""
    if not p._terms:
        return 0.0
    x = float(x)
    if x == 0.0:
        if next(iter(p._terms)) < 0:
            raise ZeroDivisionError("negative exponent evaluated at x = 0")
        return float(p._terms.get(0, 0))
    s = 0.0
    for e, c in p._terms.items():
        s += c * x**e
    return s


def eval_exact(p: LaurentPoly, x) -> Fraction:
    """Exact rational value at a rational x."""
    x = Fraction(x)
    if not p._terms:
        return Fraction(0)
    if x == 0:
        if next(iter(p._terms)) < 0:
            raise ZeroDivisionError("negative exponent evaluated at x = 0")
        return Fraction(p._terms.get(0, 0))
    s = Fraction(0)
    for e, c in p._terms.items():
        s += c * x**e
    return s


def format_poly(p: LaurentPoly) -> str:
    """Text form such as ``x^-1``, ``-x^2`` or ``1+x+x^2`` (ascending exponents)."""
    if not p._terms:
        return "0"
    out = []
    for i, (e, c) in enumerate(p._terms.items()):
        sign = "-" if c < 0 else ("+" if i else "")
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else str(mag)) + ("x" if e == 1 else f"x^{e}")
        out.append(sign + body)
    return "".join(out)


def parse_poly(text: str) -> LaurentPoly:
    """Inverse of :func:`format_poly`; accepts any term order and no whitespace."""
    if not text or text.strip() != text or " " in text:
        raise ValueError(f"malformed polynomial {text!r}")
    pos = 0
    acc: list[tuple[int, int]] = []
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        sign, digits, xpart, exp = m.group(1), m.group(2), m.group(3), m.group(4)
        if m.end() == pos or (not digits and not xpart):
            raise ValueError(f"malformed polynomial {text!r} at column {pos + 1}")
        if not sign and not first:
            raise ValueError(f"malformed polynomial {text!r} at column {pos + 1}")
        if sign == "+" and first:
            raise ValueError(f"malformed polynomial {text!r}: leading '+'")
        c = int(digits) if digits else 1
        e = 0 if not xpart else (int(exp) if exp is not None else 1)
        acc.append((e, -c if sign == "-" else c))
        pos = m.end()
        first = False
    return poly(acc)
