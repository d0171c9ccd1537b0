"""Acceptance criteria. Run with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``."""
import time
from fractions import Fraction

import numpy as np
import pytest

from apamm import analysis
from apamm.executor import MultCounter, classical_product, multiply_exact, multiply_once, multiply_recursive
from apamm.model import (builtin, builtin_text, census, decode_decimal_entry, parse_algorithm,
                         serialize_algorithm)
from apamm.laurent import eval_exact, eval_poly, poly
from apamm.verify import iter_residuals, objective_value, verify

RESULTS = []
APA46 = "smirnov-4x4x4-46"


def ac1_objective():
    t0 = time.perf_counter()
    rep = verify(builtin(APA46))
    dt = time.perf_counter() - t0
    S = rep.objective
    want = {2: 37, 4: 53, 6: 37}
    low = {e: c for e, c in S.items() if e < 2}
    odd = {e: S.coeff(e) for e in (3, 5, 7) if S.coeff(e)}
    got = {e: S.coeff(e) for e in want}
    ok = got == want and not low and not odd and dt < 10
    return ok, f"S[2,4,6]={got[2]},{got[4]},{got[6]} low={low} odd={odd} time={dt:.2f}s"


def ac2_census():
    c = census(builtin(APA46))
    multi = [(lab, t, r, col, str(p)) for lab, t, r, col, p in c.multi_term]
    ok = (c.total_slots == 2208 and c.nonzero == 352
          and multi == [("gamma", 46, 2, 3, str(poly([(1, 1), (2, 1)])))])
    return ok, f"total={c.total_slots} nonzero={c.nonzero} multi={multi}"


def ac3_flags():
    rep = verify(builtin(APA46))
    flags = {"apa46 apa-valid": rep.is_apa_valid, "apa46 inexact": not rep.is_exact}
    for n1 in range(1, 5):
        for n2 in range(1, 5):
            for n3 in range(1, 5):
                name = f"classical-{n1}x{n2}x{n3}"
                flags[name] = verify(builtin(name)).is_exact
    flags["strassen-2x2x2"] = verify(builtin("strassen-2x2x2")).is_exact
    bad = [k for k, v in flags.items() if not v]
    return not bad, f"failing: {bad}" if bad else f"{len(flags)} flags hold"


def ac4_objective_value():
    v = objective_value(builtin(APA46), 2e-5)
    ok = abs(v - 1.48e-8) <= 0.01 * 1.48e-8
    return ok, f"S(2e-5)={v:.6g} (target 1.48e-8 +-1%)"


def ac5_accuracy():
    alg = builtin(APA46)
    A, B = analysis.random_operands(alg, 1, seed=0)
    err = analysis.relative_error(multiply_once(alg, A, B, 2e-5), classical_product(A, B))
    res = analysis.sweep(alg, levels=1, x_grid=analysis.logspace_grid(1e-7, 1e-2, 25), seed=0)
    ok = err <= 1e-3 and 2e-6 <= res.optimal_x <= 2e-4
    return ok, f"error(2e-5)={err:.3g} optimal_x={res.optimal_x:.3g}"


def ac6_exact_algorithms():
    worst = 0.0
    zero_residuals = True
    names = ["strassen-2x2x2"] + [f"classical-{a}x{b}x{c}" for a in (1, 2, 3, 4)
                                  for b in (1, 2, 3, 4) for c in (1, 2, 3, 4)]
    for seed, name in enumerate(names):
        alg = builtin(name)
        A, B = analysis.random_operands(alg, 1, seed=seed)
        worst = max(worst, analysis.relative_error(multiply_once(alg, A, B, 0.5),
                                                   classical_product(A, B)))
        zero_residuals &= next(iter_residuals(alg), None) is None
    A, B = analysis.random_operands(builtin("strassen-2x2x2"), 3, seed=7)
    worst = max(worst, analysis.relative_error(
        multiply_recursive(builtin("strassen-2x2x2"), A, B, 0.5, levels=3), classical_product(A, B)))
    ok = worst <= 1e-13 and zero_residuals
    return ok, f"max relative error={worst:.3g} residuals zero={zero_residuals}"


def ac7_counting():
    alg = builtin(APA46)
    A, B = analysis.random_operands(alg, 2, seed=0)
    c = MultCounter()
    multiply_recursive(alg, A, B, 2e-5, levels=2, counter=c)
    cc = MultCounter()
    multiply_recursive(builtin("classical-4x4x4"), A, B, 1.0, levels=2, counter=cc)
    ok = c.count == 2116 and cc.count == 4096 and analysis.op_counts(alg, 2)[0] == 2116
    return ok, f"apa46={c.count} classical={cc.count}"


def ac8_scaling():
    alg = builtin(APA46)
    rng = np.random.default_rng(0)
    A = rng.integers(-9, 10, size=(4, 4)).tolist()
    B = rng.integers(-9, 10, size=(4, 4)).tolist()
    ref = classical_product(A, B, exact=True)

    def norm2(x):
        E = multiply_exact(alg, A, B, x) - ref
        return sum(v * v for v in E.ravel())

    n3, n4 = norm2(Fraction(1, 1000)), norm2(Fraction(1, 10000))
    if n4 == 0:
        return False, "error at 1e-4 is exactly zero"
    ratio = float(n3 / n4) ** 0.5
    return 5 <= ratio <= 50, f"ratio={ratio:.4g}"


def ac9_roundtrip():
    problems = []
    for name in (APA46, "strassen-2x2x2", "classical-3x3x3"):
        alg = builtin(name)
        for enc in ("decimal", "poly"):
            text = serialize_algorithm(alg, enc)
            if serialize_algorithm(parse_algorithm(text), enc) != text:
                problems.append(f"{name}/{enc}")
            if parse_algorithm(text) != alg:
                problems.append(f"{name}/{enc} structure")
    shipped = builtin_text(APA46)
    if serialize_algorithm(parse_algorithm(shipped), "decimal") != shipped:
        problems.append("shipped file not canonical")
    entries = 0
    for line in shipped.splitlines()[4:]:
        toks = line.split()
        if not toks or toks[0] in ("t", "gamma", "alpha", "beta"):
            continue
        for tok in toks:
            entries += 1
            if eval_exact(decode_decimal_entry(tok), Fraction(1, 10)) != Fraction(tok):
                problems.append(f"entry {tok}")
    return not problems, f"{entries} entries checked, problems={problems[:5]}"


CRITERIA = [
    (1, "objective polynomial S coefficients", ac1_objective),
    (2, "coefficient census", ac2_census),
    (3, "validity flags", ac3_flags),
    (4, "S(2e-5) = 1.48e-8 within 1%", ac4_objective_value),
    (5, "numeric accuracy and sweep optimum", ac5_accuracy),
    (6, "exact algorithms to 1e-13", ac6_exact_algorithms),
    (7, "recursion multiplication counts", ac7_counting),
    (8, "exact-mode scaling ratio in [5, 50]", ac8_scaling),
    (9, "format round trips", ac9_roundtrip),
]


def _run(num, desc, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # report, then fail
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} - {desc} ({detail})"
    RESULTS.append(line)
    print(line)
    return ok, line


@pytest.mark.parametrize("num,desc,fn", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(num, desc, fn):
    ok, line = _run(num, desc, fn)
    assert ok, line


if __name__ == "__main__":
    import sys
    results = [_run(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
