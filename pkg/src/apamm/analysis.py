"""Accuracy versus x: error sweeps, digits of precision, operation counts."""
from __future__ import annotations

import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .executor import MultCounter, classical_product, multiply_recursive, padded_shape
from .model import BilinearAlgorithm

EPS = sys.float_info.min  # smallest positive normal double
WORKERS_ENV = "APAMM_MAX_WORKERS"


def max_workers() -> int:
    """Worker cap from $APAMM_MAX_WORKERS (default: CPU count, at least 1)."""
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def relative_error(C_approx, C_ref) -> float:
    A = np.asarray(C_approx, dtype=float)
    R = np.asarray(C_ref, dtype=float)
    if A.shape != R.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {R.shape}")
    return float(np.linalg.norm(A - R) / max(np.linalg.norm(R), EPS))


def max_abs_error(C_approx, C_ref) -> float:
    A = np.asarray(C_approx, dtype=float)
    R = np.asarray(C_ref, dtype=float)
    if A.shape != R.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {R.shape}")
    return float(np.max(np.abs(A - R))) if A.size else 0.0


def digits_of_precision(err: float) -> float:
    if err < 0:
        raise ValueError("error must be non-negative")
    return float(-np.log10(max(err, EPS)))


def random_operands(alg: BilinearAlgorithm, levels: int = 1, seed: int = 0):
    """Uniform[-1, 1] operands from numpy's PCG64 generator (default_rng(seed)); A drawn first."""
    m1, m2, m3 = padded_shape(alg, levels)
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1.0, 1.0, size=(m1, m2))
    B = rng.uniform(-1.0, 1.0, size=(m2, m3))
    return A, B


def logspace_grid(xmin: float = 1e-7, xmax: float = 1e-2, points: int = 25) -> list:
    if not (0 < xmin <= xmax) or points < 1:
        raise ValueError("need 0 < xmin <= xmax and points >= 1")
    if points == 1:
        return [float(xmin)]
    return [float(v) for v in np.logspace(np.log10(xmin), np.log10(xmax), points)]


@dataclass
class SweepResult:
    x_grid: list
    errors: list
    seed: int
    matrix_kind: dict
    optimal_x: float
    optimal_error: float
    max_errors: list = field(default_factory=list)

    def rows(self):
        for x, e in zip(self.x_grid, self.errors):
            yield x, e, digits_of_precision(e)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "matrix_kind": self.matrix_kind,
            "optimal_x": self.optimal_x,
            "optimal_error": self.optimal_error,
            "optimal_digits": digits_of_precision(self.optimal_error),
            "rows": [{"x": x, "error": e, "digits": d, "max_abs_error": m}
                     for (x, e, d), m in zip(self.rows(), self.max_errors)],
        }

    def to_csv(self) -> str:
        lines = ["x,relative_error,digits,max_abs_error"]
        for (x, e, d), m in zip(self.rows(), self.max_errors):
            lines.append(f"{x:.17g},{e:.17g},{d:.17g},{m:.17g}")
        return "\n".join(lines) + "\n"


def sweep(alg: BilinearAlgorithm, levels: int = 1, x_grid=None, seed: int = 0,
          workers: int | None = None) -> SweepResult:
    grid = list(x_grid) if x_grid is not None else logspace_grid()
    if not grid or any(x <= 0 for x in grid):
        raise ValueError("x grid must be nonempty and positive")
    A, B = random_operands(alg, levels, seed)
    ref = classical_product(A, B)

    def one(x):
        C = multiply_recursive(alg, A, B, x, levels=levels)
        return relative_error(C, ref), max_abs_error(C, ref)

    n = min(workers or max_workers(), len(grid))
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            res = list(pool.map(one, grid))
    else:
        res = [one(x) for x in grid]
    errors = [r[0] for r in res]
    best = int(np.argmin(errors))  # first index on ties
    m1, m2, m3 = padded_shape(alg, levels)
    kind = {"distribution": "uniform[-1,1]", "generator": "numpy.default_rng/PCG64",
            "shape": [m1, m2, m3], "levels": levels}
    return SweepResult(grid, errors, seed, kind, grid[best], errors[best], [r[1] for r in res])


def op_counts(alg: BilinearAlgorithm, levels: int = 1) -> tuple[int, int]:
    """Naive multiplication and addition counts for `levels` recursive applications.

    One level costs a_alpha = nnz(alpha) - T additions on A-blocks, a_beta = nnz(beta) - T
    on B-blocks and a_gamma = nnz(gamma) - N1 on C-blocks. With block sizes shrinking by
    N2, N3 and N1 per level:

        adds(k) = T * adds(k-1) + a_alpha * N2^(k-1) + a_beta * N3^(k-1) + a_gamma * N1^(k-1)
        mults(k) = T^k
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")

    def nnz(grids):
        return sum(1 for g in grids for row in g for p in row if p)

    T = alg.T
    aa, ab, ag = nnz(alg.alpha) - T, nnz(alg.beta) - T, nnz(alg.gamma) - alg.N1
    adds = 0
    for k in range(1, levels + 1):
        adds = T * adds + aa * alg.N2 ** (k - 1) + ab * alg.N3 ** (k - 1) + ag * alg.N1 ** (k - 1)
    return T**levels, adds


def count_multiplications(alg: BilinearAlgorithm, levels: int = 1, x: float = 0.5) -> int:
    """Run the executor once on zero-padded operands and return its instrumented count."""
    m1, m2, m3 = padded_shape(alg, levels)
    counter = MultCounter()
    multiply_recursive(alg, np.ones((m1, m2)), np.ones((m2, m3)), x, levels=levels, counter=counter)
    return counter.count
