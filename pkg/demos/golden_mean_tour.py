#!/usr/bin/env python3
"""Walk through the golden-mean map T(x) = phi*x + 1/2 mod 1 by hand."""

from gmpy2 import mpq

from ibeta import (
    BetaSpec,
    TransformParams,
    closed_forms,
    detect_matching,
    m_series,
    orbit,
    symmetry_defect,
)

beta = BetaSpec.multinacci(1, 2)
params = TransformParams.make(beta, mpq(1, 2))

print("slope phi =", beta.field.beta().decimal(20))
print("alpha = 1/2, regime:", params.regime)
print()

# both critical orbits, exactly
print("orbit of 0:")
for s in orbit(params, 0, 6):
    print(f"  T^{s.n}(0) = {s.value.decimal(20):>24}  digit {s.digit}")
print("orbit of 1:")
for s in orbit(params, 1, 6):
    print(f"  T^{s.n}(1) = {s.value.decimal(20):>24}  digit {s.digit}")
print()

rec = detect_matching(params, 50)
print(f"matching: orbits coincide from step {rec.time} on")
print(f"  digits of the 0-orbit up to then: {rec.prefix_a}")
print(f"  digits of the 1-orbit up to then: {rec.prefix_b}")
print()

# matched orbits make the invariant-density series finite, so the mean
# normalized error comes out exact
v = m_series(params, 1e-10)
print("M =", v.value.decimal(30), " error bound", v.error_bound)

# at alpha = 0 the answer is 1/sqrt(5)
v0 = m_series(TransformParams.make(beta, mpq(0)), 1e-10)
print("M at alpha=0 =", v0.value.decimal(30), " (this is 1/sqrt(5))")

c = closed_forms(1, 2)
print("closed form at 0:", (c.intercept).decimal(30))
print()

d = symmetry_defect(params, 1e-9)
print("symmetry: M(alpha) + M(1-<beta+alpha>) - 1 =", d)
print("(the partner of 1/2 never matches, so the defect is the certified")
print(" truncation residual rather than an exact zero)")
