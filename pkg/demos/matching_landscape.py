#!/usr/bin/env python3
"""Scan the alpha axis for the golden mean and print the interval landscape."""

from gmpy2 import mpq

from ibeta import classify_monotonicity, scan_intervals

res = scan_intervals(1, 2, (mpq(0), mpq(1)), 2**9, 400)

print(f"grid 2^9 over [0,1): {len(res.intervals)} matching intervals, "
      f"{len(res.unmatched)} unmatched samples")
print(f"fraction of samples not in a found interval: {res.residual_fraction:.4f}")
print()
print(f"{'lo':>12} {'hi':>12} {'time':>4} {'slope':>12} {'dir':>12}")
for itv in sorted(res, key=lambda iv: float(iv.lo)):
    try:
        mono = classify_monotonicity(itv)
    except ValueError:
        mono = "(maximal)"
    print(f"{float(itv.lo):12.8f} {float(itv.hi):12.8f} {itv.record.time:4d} "
          f"{itv.slope_float():12.6f} {mono:>12}")

print()
print("the first interval carries matching time 2 and covers [0, 2-phi);")
print("right of it the times climb and the slopes alternate sign with")
print("magnitude growing roughly like phi^k, which is why the curve of M")
print("wiggles violently there while staying continuous")
