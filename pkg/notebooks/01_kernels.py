"""Biweight kernel: values, derivatives and moment identities.

Run: python3 notebooks/01_kernels.py
"""
import numpy as np

from errdens.kernels import BIWEIGHT, eval_derivative, eval_kernel, eval_product, verify_moments

u = np.linspace(-1.25, 1.25, 11)
print("u        K(u)      K'(u)     K''(u)    K'''(u)")
for row in zip(u, eval_kernel(BIWEIGHT, u), *(eval_derivative(BIWEIGHT, r, u) for r in (1, 2, 3))):
    print("  ".join(f"{v:+.4f}" for v in row))

# product kernel over three coordinates
z = np.array([[0.0, 0.0, 0.0], [0.5, -0.5, 0.2], [0.9, 0.0, 1.0]])
print("\nproduct kernel:", eval_product(BIWEIGHT, z))

# moment identities by Gauss-Legendre quadrature.  Note the last one: the
# third derivative jumps at +-1, and the classical integral of v K''' is 15,
# not 0 (integration by parts leaves boundary terms of K'').
report = verify_moments(BIWEIGHT, 1e-9)
print()
for c in report.checks:
    print(f"{'ok ' if c.passed else 'BAD'} {c.name:<12} {c.value:+.12f}  expected {c.expected:+.6f}")
