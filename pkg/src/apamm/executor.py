"""Running bilinear algorithms on concrete matrices."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .laurent import eval_exact, eval_poly
from .model import BilinearAlgorithm


class ShapeError(ValueError):
    pass


class MultCounter:
    """Counts scalar form-products performed by the executor."""

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


@dataclass(frozen=True)
class Schedule:
    """Per-product nonzero coefficients evaluated at one x, in row-major order."""
    T: int
    dims: tuple
    alpha: tuple  # per t: ((row, col, value), ...)
    beta: tuple
    gamma: tuple


def _compile(grids, ev):
    out = []
    for g in grids:
        out.append(tuple((r, c, ev(p)) for r, row in enumerate(g) for c, p in enumerate(row) if p))
    return tuple(out)


@lru_cache(maxsize=64)
def compile_schedule(alg: BilinearAlgorithm, x, exact: bool = False) -> Schedule:
    if exact:
        xq = Fraction(x)
        ev = lambda p: eval_exact(p, xq)  # noqa: E731
    else:
        xf = float(x)
        ev = lambda p: eval_poly(p, xf)  # noqa: E731
    return Schedule(alg.T, alg.dims, _compile(alg.alpha, ev), _compile(alg.beta, ev),
                    _compile(alg.gamma, ev))


def _form(terms, M, zero):
    acc = None
    for r, c, v in terms:
        term = v * M[r][c]
        acc = term if acc is None else acc + term
    return zero if acc is None else acc


def linear_forms(grids, M, x, exact: bool = False) -> list:
    """Value of every form sum_{r,c} coeff[t][r][c](x) * M[r][c], for t = 1..T."""
    if not grids:
        return []
    rows, cols = len(grids[0]), len(grids[0][0])
    M = _as_matrix(M, exact)
    if M.shape != (rows, cols):
        raise ShapeError(f"matrix is {M.shape[0]}x{M.shape[1]}, grids are {rows}x{cols}")
    ev = (lambda p: eval_exact(p, Fraction(x))) if exact else (lambda p: eval_poly(p, float(x)))
    zero = Fraction(0) if exact else 0.0
    return [_form(t, M, zero) for t in _compile(grids, ev)]


def _apply(sched: Schedule, A, B, product, zero_a, zero_b, zero_c):
    n1, n2, n3 = sched.dims
    C = [[None] * n3 for _ in range(n1)]
    for t in range(sched.T):
        P = product(_form(sched.alpha[t], A, zero_a), _form(sched.beta[t], B, zero_b))
        for r, c, v in sched.gamma[t]:
            term = v * P
            C[r][c] = term if C[r][c] is None else C[r][c] + term
    return [[zero_c if v is None else v for v in row] for row in C]


def _as_matrix(M, exact: bool):
    if exact:
        arr = np.array(M, dtype=object)
        if arr.ndim != 2:
            raise ShapeError("matrix must be two-dimensional")
        return np.vectorize(Fraction, otypes=[object])(arr) if arr.size else arr
    arr = np.asarray(M, dtype=float)
    if arr.ndim != 2:
        raise ShapeError("matrix must be two-dimensional")
    return arr


def _check_once(alg, A, B):
    n1, n2, n3 = alg.dims
    if A.shape != (n1, n2) or B.shape != (n2, n3):
        raise ShapeError(f"{alg.name} needs {n1}x{n2} times {n2}x{n3}, got "
                         f"{A.shape[0]}x{A.shape[1]} times {B.shape[0]}x{B.shape[1]}")


def multiply_once(alg: BilinearAlgorithm, A, B, x, counter: MultCounter | None = None,
                  exact: bool = False) -> np.ndarray:
    A, B = _as_matrix(A, exact), _as_matrix(B, exact)
    _check_once(alg, A, B)
    sched = compile_schedule(alg, Fraction(x) if exact else float(x), exact)
    zero = Fraction(0) if exact else 0.0
    Al, Bl = A.tolist(), B.tolist()

    def product(p, q):
        if counter is not None:
            counter.count += 1
        return p * q

    C = _apply(sched, Al, Bl, product, zero, zero, zero)
    return np.array(C, dtype=object if exact else float)


def multiply_exact(alg: BilinearAlgorithm, A, B, x, counter: MultCounter | None = None) -> np.ndarray:
    x = Fraction(x)
    if x == 0:
        raise ZeroDivisionError("x must be nonzero")
    return multiply_once(alg, A, B, x, counter=counter, exact=True)


def _blocks(M, br, bc):
    return [[M[i * br:(i + 1) * br, j * bc:(j + 1) * bc] for j in range(M.shape[1] // bc)]
            for i in range(M.shape[0] // br)]


def padded_shape(alg: BilinearAlgorithm, levels: int):
    n1, n2, n3 = alg.dims
    return (n1**levels, n2**levels, n3**levels)


def multiply_recursive(alg: BilinearAlgorithm, A, B, x, levels: int = 1, pad: bool = False,
                       counter: MultCounter | None = None, exact: bool = False) -> np.ndarray:
    """Apply the algorithm recursively: each level treats the operands as n1 x n2 and
    n2 x n3 grids of blocks. The same x is used at every level."""
    if levels < 1:
        raise ValueError("levels must be at least 1")
    A, B = _as_matrix(A, exact), _as_matrix(B, exact)
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"inner dimensions differ: {A.shape[1]} vs {B.shape[0]}")
    m1, m2, m3 = padded_shape(alg, levels)
    rows, cols = A.shape[0], B.shape[1]
    if (rows, A.shape[1], cols) != (m1, m2, m3):
        if not pad:
            raise ShapeError(f"levels={levels} needs {m1}x{m2} times {m2}x{m3}, got "
                             f"{rows}x{A.shape[1]} times {B.shape[0]}x{cols} (use pad)")
        if rows > m1 or A.shape[1] > m2 or cols > m3:
            raise ShapeError(f"operands exceed {m1}x{m2} times {m2}x{m3}; raise levels")
        Ap = np.zeros((m1, m2), dtype=A.dtype)
        Bp = np.zeros((m2, m3), dtype=B.dtype)
        if exact:
            Ap[:] = Fraction(0)
            Bp[:] = Fraction(0)
        Ap[:rows, :A.shape[1]] = A
        Bp[:B.shape[0], :cols] = B
        A, B = Ap, Bp
    C = _recurse(alg, A, B, x, levels, counter, exact)
    return C[:rows, :cols]


def _recurse(alg, A, B, x, levels, counter, exact):
    if levels == 1:
        return multiply_once(alg, A, B, x, counter=counter, exact=exact)
    n1, n2, n3 = alg.dims
    br, bk, bc = A.shape[0] // n1, A.shape[1] // n2, B.shape[1] // n3
    sched = compile_schedule(alg, Fraction(x) if exact else float(x), exact)
    dtype = object if exact else float

    def zeros(r, c):
        z = np.zeros((r, c), dtype=dtype)
        if exact:
            z[:] = Fraction(0)
        return z

    def product(P, Q):
        return _recurse(alg, P, Q, x, levels - 1, counter, exact)

    C = _apply(sched, _blocks(A, br, bk), _blocks(B, bk, bc), product,
               zeros(br, bk), zeros(bk, bc), zeros(br, bc))
    return np.block(C)


def classical_product(A, B, exact: bool = False) -> np.ndarray:
    """Plain triple loop, no compensated summation."""
    A, B = _as_matrix(A, exact), _as_matrix(B, exact)
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"inner dimensions differ: {A.shape[1]} vs {B.shape[0]}")
    n, m, p = A.shape[0], A.shape[1], B.shape[1]
    Al, Bl = A.tolist(), B.tolist()
    C = []
    for i in range(n):
        row = []
        for k in range(p):
            s = Fraction(0) if exact else 0.0
            for j in range(m):
                s += Al[i][j] * Bl[j][k]
            row.append(s)
        C.append(row)
    return np.array(C, dtype=object if exact else float).reshape(n, p)


# CSV matrices ---------------------------------------------------------------

def parse_matrix_csv(text: str, exact: bool = False) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(v.strip() for v in r)]
    if not rows:
        raise ValueError("empty matrix")
    width = len(rows[0])
    out = []
    for n, r in enumerate(rows, start=1):
        if len(r) != width:
            raise ValueError(f"row {n} has {len(r)} values, expected {width}")
        try:
            out.append([Fraction(v.strip()) if exact else float(v) for v in r])
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"row {n}: bad number in {r!r}") from None
    return np.array(out, dtype=object if exact else float)


def read_matrix_csv(path, exact: bool = False) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix_csv(fh.read(), exact)


def format_matrix_csv(M) -> str:
    lines = []
    for row in np.asarray(M, dtype=object).tolist():
        lines.append(",".join(str(v) if isinstance(v, Fraction) else format(float(v), ".17g")
                              for v in row))
    return "\n".join(lines) + "\n"
