"""Bandwidth formulas, the remainder R_n and the convergence regimes.

Run: python3 notebooks/03_bandwidths_and_rates.py
"""
import numpy as np

from errdens.bandwidth import (
    assumption_diagnostics,
    b0_branch_terms,
    optimal_b0,
    rate_regime,
    rn_remainder,
    silverman_b1,
)

print("which term sets b0 when b1 follows the Silverman rule (sigma = 1)")
print("     n   d=1 branch   d=3 branch   d=3 terms")
for n in (50, 100, 500, 1000, 5000):
    b1 = silverman_b1(1.0, n)
    t = b0_branch_terms(n, 3, b1)
    print(f"{n:6d}   {optimal_b0(n, 1, b1)[1].value:>9}   {optimal_b0(n, 3, b1)[1].value:>9}"
          f"   ({t[0]:.3f}, {t[1]:.3f})")
# in d = 3 the first term only wins once n b1^19 >= 1, i.e. b1 of order one
print("d=3, b1 = 1:", optimal_b0(100, 3, 1.0)[1].value)

print("\nrate exponents")
for d in range(1, 7):
    r = rate_regime(d)
    print(f"d={d}: b1* ~ n^({r.b1_star_exponent}), MSE ~ n^({r.rate_exponent})")

# grid search over b0 for the remainder against the closed-form choice
n = 10**6
b1 = silverman_b1(1.0, n)
grid = np.geomspace(1e-4, 1, 2001)
best = grid[np.argmin([rn_remainder(n, 1, b, b1) for b in grid])]
print(f"\nn=1e6, d=1: argmin R_n = {best:.4f}, formula b0 = {optimal_b0(n, 1, b1)[0]:.4f}")

print("\nassumption diagnostics, n=2000, d=1")
b0, _ = optimal_b0(2000, 1, silverman_b1(1.0, 2000))
for dg in assumption_diagnostics(2000, 1, b0, silverman_b1(1.0, 2000)).diagnostics:
    print(f"{dg.assumption:>4} {dg.quantity:<22} {dg.value:12.4g}  {dg.requirement:<9} "
          f"{'ok' if dg.satisfied else 'not met'}")
