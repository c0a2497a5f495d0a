#!/usr/bin/env python3
"""Sketch a few invariant densities as text bars and check invariance."""

from gmpy2 import mpq

from ibeta import (
    BetaSpec,
    TransformParams,
    build_series,
    eval_density,
    invariance_defect,
    normalization,
)

CASES = [
    ("golden mean, greedy", BetaSpec.multinacci(1, 2), mpq(0)),
    ("golden mean, centered", BetaSpec.multinacci(1, 2), mpq(1, 2)),
    ("beta_{2,2}, alpha=1/5", BetaSpec.multinacci(2, 2), mpq(1, 5)),
    ("float beta=2.5, alpha=0.3", BetaSpec.from_value(2.5), 0.3),
]

for title, beta, alpha in CASES:
    params = TransformParams.make(beta, alpha)
    series = build_series(params, 1e-10)
    K = normalization(series)
    print(title)
    print(f"  matched at {series.matched_at}, tail bound {series.tail_bound:.1e},"
          f" raw integral {float(K.value):.6f}")
    for i in range(24):
        x = mpq(2 * i + 1, 48) if params.is_exact else (2 * i + 1) / 48
        g = float(eval_density(series, x))
        print(f"  {float(x):5.3f} {'#' * max(1, round(g * 30)):<50} {g:.4f}")
    # push a few thresholds through T^{-1} and compare measures
    worst = max(invariance_defect(params, series,
                                  mpq(j, 8) if params.is_exact else j / 8)
                for j in range(1, 8))
    print(f"  invariance defect over 7 thresholds: {worst:.2e}")
    print()

print("steps sit at the critical-orbit points; matched parameters have")
print("finitely many of them and an exactly zero tail")
