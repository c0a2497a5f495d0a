#!/usr/bin/env python3
"""Closed forms on the maximal interval, their growth in m, and root gaps."""

from gmpy2 import mpq

from ibeta import beta_gap_bounds, closed_forms, get_field, monotone_table

print("multinacci roots beta_{q,m} and the linear law M = intercept + slope*alpha")
print("on the maximal interval [0, 1-<beta>):")
print()
for q in (1, 2, 3):
    print(f"q = {q}")
    for row in monotone_table(q, range(2, 7)):
        b = get_field(q, row.m).beta().decimal(12)
        up = ""
        if row.slope_increased is not None:
            up = "  (both larger than the row above)"
        print(f"  m={row.m}  beta={b}  slope={float(row.slope):.10f}  "
              f"intercept={float(row.intercept):.10f}{up}")
    print()

print("the slope and intercept increase strictly in m: longer memory in the")
print("recurrence pushes the mean normalized error up")
print()

# consecutive roots are separated by more than the next root's distance
# to q+1; the three quantities are certified from rational enclosures
print("gap chain for q=1 (all from 1e-30 wide enclosures):")
for m in range(2, 8):
    g = beta_gap_bounds(1, m, mpq(1, 10**30))
    print(f"  m={m}  q/beta_m^m={g.upper:.12f} > beta_(m+1)-beta_m={g.gap:.12f}"
          f" > (1-1/beta_m)/beta_(m+1)^m={g.lower:.12f}")
