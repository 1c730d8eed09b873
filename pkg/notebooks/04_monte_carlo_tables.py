"""Monte Carlo bias / variance / MSE tables for both simulation models.

Takes a few seconds single-threaded.  Set ERRDENS_THREADS to use more cores;
the numbers do not change.

Run: python3 notebooks/04_monte_carlo_tables.py
"""
from errdens.simulation import SINE1D, TRIVARIATE, run_monte_carlo

for model, sizes in ((SINE1D, (50, 100)), (TRIVARIATE, (100, 200))):
    print(f"\n{model.name}")
    print("  e     n    c0   est        bias     var      mse")
    for n in sizes:
        for c0 in (0.25, 0.5, 1.0):
            rep = run_monte_carlo(model, n, 300, c0, [-1, 0, 1], seed=2024)
            for r in sorted(rep.rows, key=lambda r: (r.e, r.estimator)):
                print(f"{r.e:+3.0f}  {n:4d}  {c0:4.2f}  {r.estimator:<9} "
                      f"{r.bias:+.4f}  {r.variance:.4f}  {r.mse:.4f}")
