"""Estimating the error density from one sample.

Simulates a sample, fits the leave-one-out regression, and compares the
residual-based density with the true-error version and the N(0, 1) truth.

Run: python3 notebooks/02_estimate.py
"""
import numpy as np

from errdens.bandwidth import BandwidthPlan
from errdens.density import feasible_density, oracle_density
from errdens.regression import TrimBox, loo_nadaraya_watson, trim_mask
from errdens.simulation import SINE1D, TRIVARIATE, generate, true_density

grid = np.linspace(-3, 3, 7)
for model, n in ((SINE1D, 200), (TRIVARIATE, 400)):
    data, errors = generate(model, n, np.random.default_rng(11))
    plan = BandwidthPlan.from_formula(n, model.d, errors.std(ddof=1), c0=1.0)
    fit = loo_nadaraya_watson(data, plan.b0)
    mask = trim_mask(data, TrimBox.unit_cube(model.d))

    f_hat = feasible_density(fit, mask, grid, plan.b1)
    f_tilde = oracle_density(errors, mask, grid, plan.b1)
    print(f"\n{model.name}, n={n}: b0={plan.b0:.4f} ({plan.branch.value}), b1={plan.b1:.4f}, "
          f"{f_hat.n_used} residuals used, {fit.n_undefined} undefined fits")
    print("   e    f_hat   f_tilde   truth")
    for e, a, b, t in zip(grid, f_hat.values, f_tilde.values, true_density(grid)):
        print(f"{e:+5.1f}  {a:.4f}   {b:.4f}   {t:.4f}")
