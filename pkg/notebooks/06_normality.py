"""Standardised estimates against N(0, 1).

Standardises sqrt(n b1) (f_hat(e) - centre) by the limiting variance over
500 replicates and reports moments and the KS distance.  About a minute.

Run: python3 notebooks/06_normality.py
"""
import numpy as np

from errdens.bandwidth import optimal_b0, silverman_b1
from errdens.simulation import SINE1D, normality_diagnostic

n = 2000
b1 = silverman_b1(1.0, n)
b0, _ = optimal_b0(n, 1, b1)
rep = normality_diagnostic(SINE1D, n, 500, 1.0, b0, b1, seed=2024)
print(f"b0={rep.b0:.4f} b1={rep.b1:.4f}  centre={rep.center:.5f}  variance={rep.variance:.5f}")
print(f"mean {rep.mean:+.3f}  sd {rep.sd:.3f}  KS {rep.ks_distance:.3f} (p = {rep.ks_pvalue:.3f})")

# crude text histogram of z
counts, edges = np.histogram(rep.z, bins=np.linspace(-3.5, 3.5, 15))
for c, lo in zip(counts, edges):
    print(f"{lo:+5.1f} {'#' * (c // 4)}")
