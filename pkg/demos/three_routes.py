#!/usr/bin/env python3
"""Compute the same M three ways and watch the error bounds do their job."""

from gmpy2 import mpq

from ibeta import (
    BetaSpec,
    TransformParams,
    detect_matching,
    m_birkhoff,
    m_finite,
    m_series,
)

print("exact case: beta_{2,3}, alpha = 1/7")
beta = BetaSpec.multinacci(2, 3)
alpha = mpq(1, 7)
params = TransformParams.make(beta, alpha)

vs = m_series(params, 1e-10)
print("  series    ", vs.value.decimal(30), " error", vs.error_bound)

rec = detect_matching(params, 1000)
vf = m_finite(rec, beta, alpha)
print("  finite sum", vf.value.decimal(30), " error", vf.error_bound)
print("  difference", float(vf.value - vs.value))

vb = m_birkhoff(params, 10**6, 10**3, seed=1)
dev = abs(vb.value - float(vs.value))
print(f"  birkhoff   {vb.value!r}  stderr {vb.error_bound:.2e}"
      f"  deviation {dev / vb.error_bound:.2f} sigma")
print()

print("float case: beta = 2.71, alpha = 0.4 (no exact matching available)")
params = TransformParams.make(BetaSpec.from_value(2.71), 0.4)
vs = m_series(params, 1e-10)
print("  series    ", vs.value, " certified error", vs.error_bound)
vb = m_birkhoff(params, 10**6, 10**3, seed=2)
print(f"  birkhoff   {vb.value!r}  stderr {vb.error_bound:.2e}"
      f"  deviation {abs(vb.value - vs.value) / vb.error_bound:.2f} sigma")
print()

print("integer slope: beta = 2 preserves Lebesgue measure, so M = 1/2 for")
print("every alpha")
for a in (0.0, 0.25, 0.9):
    v = m_series(TransformParams.make(BetaSpec.from_value(2.0), a), 1e-9)
    print(f"  alpha={a:4}  M={v.value}  error {v.error_bound:.2e}")
