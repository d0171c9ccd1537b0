"""Exact checking of bilinear algorithms against Brent's equations.

Index convention: all public 6-index tuples are 1-based, ordered
(i1, i2, j1, j2, k1, k2) for gamma[i1][i2], alpha[j1][j2], beta[k1][k2].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .laurent import LaurentPoly, ZERO, eval_poly, format_poly
from .model import BilinearAlgorithm, census

SCHEMA_VERSION = 1
DISPLAY_CUTOFF = 8


def _check_index(dims, idx):
    n1, n2, n3 = dims
    bounds = (n1, n3, n1, n2, n2, n3)
    if len(idx) != 6:
        raise IndexError("expected six indices")
    for v, hi in zip(idx, bounds):
        if not 1 <= v <= hi:
            raise IndexError(f"index {idx} out of range for dims {dims}")


def target_tensor(dims, i1, i2, j1, j2, k1, k2) -> int:
    _check_index(dims, (i1, i2, j1, j2, k1, k2))
    return int(i1 == j1 and j2 == k1 and i2 == k2)


def residual(alg: BilinearAlgorithm, i1, i2, j1, j2, k1, k2) -> LaurentPoly:
    _check_index(alg.dims, (i1, i2, j1, j2, k1, k2))
    acc = ZERO
    for t in range(alg.T):
        g = alg.gamma[t][i1 - 1][i2 - 1]
        if not g:
            continue
        a = alg.alpha[t][j1 - 1][j2 - 1]
        if not a:
            continue
        b = alg.beta[t][k1 - 1][k2 - 1]
        if b:
            acc = acc + g * a * b
    return acc - target_tensor(alg.dims, i1, i2, j1, j2, k1, k2)


def _sparse(grid):
    return [((r, c), p) for r, row in enumerate(grid) for c, p in enumerate(row) if p]


def iter_residuals(alg: BilinearAlgorithm) -> Iterator[tuple[tuple, LaurentPoly]]:
    """Yield (index, residual) for every nonzero residual, in lexicographic index order."""
    acc: dict[tuple, LaurentPoly] = {}
    for t in range(alg.T):
        gs, as_, bs = _sparse(alg.gamma[t]), _sparse(alg.alpha[t]), _sparse(alg.beta[t])
        if not (gs and as_ and bs):
            continue
        for (gi, g) in gs:
            for (ai, a) in as_:
                ga = g * a
                for (bi, b) in bs:
                    key = (gi[0], gi[1], ai[0], ai[1], bi[0], bi[1])
                    acc[key] = acc.get(key, ZERO) + ga * b
    n1, n2, n3 = alg.dims
    for i in range(n1):
        for j in range(n2):
            for k in range(n3):
                key = (i, k, i, j, j, k)
                acc[key] = acc.get(key, ZERO) - 1
    for key in sorted(acc):
        p = acc[key]
        if p:
            yield tuple(v + 1 for v in key), p


@dataclass
class VerificationReport:
    is_exact: bool
    is_apa_valid: bool
    min_residual_order: float | int
    worst_indices: list
    objective: LaurentPoly
    residual_count_nonzero: int
    residual_count_total: int
    census: object = None
    residuals: dict | None = field(default=None, repr=False)

    def objective_display(self, cutoff: int = DISPLAY_CUTOFF) -> str:
        return format_objective(self.objective, cutoff)

    def to_dict(self, full_objective: bool = False) -> dict:
        S = self.objective if full_objective else self.objective.truncate(DISPLAY_CUTOFF)
        mro = self.min_residual_order
        return {
            "schema_version": SCHEMA_VERSION,
            "is_exact": self.is_exact,
            "is_apa_valid": self.is_apa_valid,
            "min_residual_order": None if mro == math.inf else mro,
            "worst_indices": [list(ix) for ix in self.worst_indices],
            "residual_count_nonzero": self.residual_count_nonzero,
            "residual_count_total": self.residual_count_total,
            "objective": [[e, c] for e, c in S.items()],
            "objective_truncated_at": None if full_objective else DISPLAY_CUTOFF,
            "census": self.census.to_dict() if self.census is not None else None,
        }


def format_objective(S: LaurentPoly, cutoff: int | None = DISPLAY_CUTOFF) -> str:
    """Human form such as ``37x^2 + 53x^4 + 37x^6 + ...``."""
    if S.is_zero():
        return "0"
    shown = S if cutoff is None else S.truncate(cutoff)
    parts = []
    for e, c in shown.items():
        mono = format_poly(LaurentPoly({e: abs(c)}))
        sign = "-" if c < 0 else "+"
        parts.append((sign, mono))
    text = ""
    for n, (sign, mono) in enumerate(parts):
        if n == 0:
            text = ("-" if sign == "-" else "") + mono
        else:
            text += f" {sign} {mono}"
    if cutoff is not None and shown != S:
        text = (text + " + ..." if text else f"O(x^{cutoff})")
    return text


def verify(alg: BilinearAlgorithm, keep_residuals: bool = False) -> VerificationReport:
    S: dict[int, int] = {}
    min_order = math.inf
    worst: list = []
    count = 0
    kept = {} if keep_residuals else None
    for idx, r in iter_residuals(alg):
        count += 1
        o = next(iter(r.items()))[0]
        if o < min_order:
            min_order, worst = o, [idx]
        elif o == min_order:
            worst.append(idx)
        sq = r * r
        for e, c in sq.items():
            S[e] = S.get(e, 0) + c
        if kept is not None:
            kept[idx] = r
    objective = LaurentPoly(S)
    return VerificationReport(
        is_exact=count == 0,
        is_apa_valid=min_order >= 1,
        min_residual_order=min_order,
        worst_indices=worst,
        objective=objective,
        residual_count_nonzero=count,
        residual_count_total=alg.N1 * alg.N2 * alg.N3,
        census=census(alg),
        residuals=kept,
    )


def objective_value(alg_or_report, x: float) -> float:
    rep = alg_or_report if isinstance(alg_or_report, VerificationReport) else verify(alg_or_report)
    return eval_poly(rep.objective, x)
