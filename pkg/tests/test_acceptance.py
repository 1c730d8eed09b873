"""Acceptance checks for the error-density estimator.

Each check returns ``(passed, detail)``; the pytest wrappers print one
``PASS``/``FAIL`` line per criterion and then assert.  Run the module
directly (``python3 -m tests.test_acceptance``) to get just the nine lines.

Stochastic checks use the fixed seed ``SEED`` declared below.  It was fixed
before any acceptance run and is not tuned.
"""
import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from errdens.bandwidth import Branch, optimal_b0, rate_regime, rn_remainder, silverman_b1
from errdens.density import default_grid, feasible_density, oracle_density
from errdens.kernels import BIWEIGHT, verify_moments
from errdens.regression import SampleSet, TrimBox, loo_nadaraya_watson, trim_mask
from errdens.simulation import (
    SINE1D,
    TRIVARIATE,
    normality_diagnostic,
    run_monte_carlo,
)

try:
    from .reference import naive_density, naive_loo_nw
except ImportError:  # run as a plain script
    from reference import naive_density, naive_loo_nw

SEED = 2024
E_POINTS = (-1.0, 0.0, 1.0)
C0S = (0.25, 0.5, 1.0)

# published n = 100 cells for the univariate model:
# (e, c0) -> (oracle variance, oracle mse, feasible variance, feasible mse)
TABLE1 = {
    (-1.0, 0.25): (0.0034, 0.0034, 0.0027, 0.0027),
    (-1.0, 0.5): (0.0034, 0.0034, 0.0034, 0.0034),
    (-1.0, 1.0): (0.0034, 0.0034, 0.0030, 0.0030),
    (0.0, 0.25): (0.0054, 0.0054, 0.0044, 0.0063),
    (0.0, 0.5): (0.0054, 0.0054, 0.0053, 0.0059),
    (0.0, 1.0): (0.0054, 0.0054, 0.0050, 0.0062),
    (1.0, 0.25): (0.0038, 0.0038, 0.0033, 0.0033),
    (1.0, 0.5): (0.0038, 0.0038, 0.0034, 0.0035),
    (1.0, 1.0): (0.0038, 0.0038, 0.0033, 0.0034),
}

# published cells for the trivariate model:
# (e, n, c0) -> (oracle bias, oracle variance, feasible bias)
TABLE2 = {
    (-1.0, 100, 0.25): (-0.0013, 0.0035, -0.1250),
    (-1.0, 100, 0.5): (-0.0013, 0.0035, -0.0180),
    (-1.0, 100, 1.0): (-0.0013, 0.0035, 0.0064),
    (-1.0, 200, 0.25): (0.0020, 0.0019, -0.1078),
    (-1.0, 200, 0.5): (0.0020, 0.0019, -0.0114),
    (-1.0, 200, 1.0): (0.0020, 0.0019, 0.0017),
    (0.0, 100, 0.25): (-0.0049, 0.0047, -0.1858),
    (0.0, 100, 0.5): (-0.0049, 0.0047, -0.0930),
    (0.0, 100, 1.0): (-0.0049, 0.0047, -0.0377),
    (0.0, 200, 0.25): (-0.0024, 0.0030, -0.1713),
    (0.0, 200, 0.5): (-0.0024, 0.0030, -0.0764),
    (0.0, 200, 1.0): (-0.0024, 0.0030, -0.0297),
    (1.0, 100, 0.25): (-0.0020, 0.0031, 0.0341),
    (1.0, 100, 0.5): (-0.0020, 0.0031, -0.0131),
    (1.0, 100, 1.0): (-0.0020, 0.0031, -0.0010),
    (1.0, 200, 0.25): (-0.0064, 0.0019, 0.0239),
    (1.0, 200, 0.5): (-0.0006, 0.0019, -0.0101),
    (1.0, 200, 1.0): (-0.0006, 0.0019, -0.0126),
}


def within_band(value, target, rel=0.5, abs_=0.003):
    """``|value - target| <= max(rel |target|, abs_)``."""
    return abs(value - target) <= max(rel * abs(target), abs_)


def _random_sample(rng, n_min=2, n_max=50):
    n = int(rng.integers(n_min, n_max + 1))
    d = int(rng.choice([1, 3]))
    X = rng.uniform(size=(n, d))
    Y = 1 + X.sum(axis=1) + rng.normal(size=n)
    return SampleSet(X, Y), float(rng.uniform(0.3, 1.2))


def _pipeline(data, b0, b1, e):
    fit = loo_nadaraya_watson(data, b0)
    mask = trim_mask(data, TrimBox.unit_cube(data.d))
    return feasible_density(fit, mask, e, b1)


# -- individual criteria ------------------------------------------------------


def kernel_identities():
    t0 = time.perf_counter()
    report = verify_moments(BIWEIGHT, 1e-9)
    elapsed = time.perf_counter() - t0
    bad = ", ".join(f"{c.name}={c.value:.6g} (want {c.expected:g})" for c in report.failures())
    ok = report.all_passed and len(report.checks) == 9 and elapsed < 1.0
    detail = f"{sum(c.passed for c in report.checks)}/9 checks in {elapsed:.3f}s"
    return ok, detail + (f"; failing: {bad}" if bad else "")


def oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst_nw = worst_f = 0.0
    for _ in range(200):
        data, b0 = _random_sample(rng)
        fit = loo_nadaraya_watson(data, b0)
        ref = np.array(naive_loo_nw(data.X.tolist(), data.Y.tolist(), b0))
        if not np.array_equal(np.isnan(ref), ~fit.defined_mask):
            return False, "defined/undefined pattern differs from the reference"
        ok = fit.defined_mask
        if ok.any():
            worst_nw = max(worst_nw, np.max(np.abs(fit.m_hat[ok] - ref[ok]) / np.abs(ref[ok]).clip(1e-300)))
        mask = rng.uniform(size=data.n) > 0.2
        mask[np.flatnonzero(ok)[:1]] = True
        if not (mask & ok).any():
            continue
        e = np.linspace(-3, 3, 7)
        b1 = float(rng.uniform(0.2, 1.5))
        got = feasible_density(fit, mask, e, b1).values
        want = np.array(naive_density(fit.residuals, mask & ok, e, b1))
        nz = want != 0
        if np.any(got[~nz] != 0):
            return False, "density nonzero where the reference is exactly zero"
        if nz.any():
            worst_f = max(worst_f, np.max(np.abs(got[nz] - want[nz]) / want[nz]))
    elapsed = time.perf_counter() - t0
    ok = worst_nw <= 1e-12 and worst_f <= 1e-12 and elapsed < 10
    return ok, f"max rel err NW {worst_nw:.2e}, density {worst_f:.2e}, {elapsed:.1f}s"


def estimator_identities(cases=100):
    rng = np.random.default_rng(SEED + 1)
    e = np.linspace(-3, 3, 13)
    fails = []
    for i in range(cases):
        # n >= 10 and b0 >= 0.3 keep the usable set nonempty
        data, b0 = _random_sample(rng, n_min=10)
        b1 = float(rng.uniform(0.2, 1.5))
        c = float(rng.uniform(-50, 50))
        s = float(rng.uniform(0.1, 10))
        perm = rng.permutation(data.n)
        base = _pipeline(data, b0, b1, e).values
        shifted = _pipeline(SampleSet(data.X, data.Y + c), b0, b1, e).values
        scaled = _pipeline(SampleSet(data.X, s * data.Y), b0, s * b1, s * e).values
        permuted = _pipeline(SampleSet(data.X[perm], data.Y[perm]), b0, b1, e).values
        if not np.allclose(shifted, base, rtol=1e-9, atol=1e-9):
            fails.append(("shift", i))
        if not np.allclose(scaled, base / s, rtol=1e-9, atol=1e-12):
            fails.append(("scale", i))
        if not np.allclose(permuted, base, rtol=1e-12, atol=1e-14):
            fails.append(("permutation", i))
        # unit integral and nonnegativity on a 512-point grid for a clean sample
        res = rng.standard_t(5, size=int(rng.integers(20, 300))) * rng.uniform(0.3, 3)
        mask = np.ones(res.size, bool)
        bw = silverman_b1(res.std(ddof=1), res.size)
        grid = default_grid(res, bw)
        curve = oracle_density(res, mask, grid, bw)
        if grid.size != 512 or abs(curve.integral() - 1) > 1e-3:
            fails.append(("unit integral", i))
        if np.any(curve.values < 0):
            fails.append(("nonnegativity", i))
        model = SINE1D if i % 2 else TRIVARIATE
        rep = run_monte_carlo(model, 30, 2, 1.0, e, seed=SEED + i, mode="oracle_regression")
        if not np.array_equal(rep.estimates["feasible"], rep.estimates["oracle"]):
            fails.append(("oracle_regression", i))
    kinds = sorted({k for k, _ in fails})
    return not fails, f"{cases} cases x 6 identities" + (f"; failing: {kinds}" if kinds else "")


def table1_reproduction():
    t0 = time.perf_counter()
    misses = []
    for c0 in C0S:
        rep = run_monte_carlo(SINE1D, 100, 300, c0, E_POINTS, seed=SEED, threads=1)
        for e in E_POINTS:
            ov, om, fv, fm = TABLE1[(e, c0)]
            o, f = rep.row(e, "oracle"), rep.row(e, "feasible")
            for tag, got, want in (
                ("oracle var", o.variance, ov),
                ("oracle mse", o.mse, om),
                ("feasible var", f.variance, fv),
                ("feasible mse", f.mse, fm),
            ):
                if not within_band(got, want):
                    misses.append(f"{tag} e={e:g} c0={c0:g}: {got:.4f} vs {want:.4f}")
    elapsed = time.perf_counter() - t0
    ok = not misses and elapsed < 120
    return ok, f"{36 - len(misses)}/36 cells in band, {elapsed:.1f}s" + (
        f"; misses: {misses}" if misses else ""
    )


def table2_reproduction():
    misses, total = [], 0
    for n in (100, 200):
        # the oracle estimator does not depend on c0, so one run per n covers it
        rep = run_monte_carlo(TRIVARIATE, n, 300, 1.0, E_POINTS, seed=SEED, threads=1)
        for e in E_POINTS:
            o, f = rep.row(e, "oracle"), rep.row(e, "feasible")
            for c0 in C0S:
                pb, pv, pf = TABLE2[(e, n, c0)]
                cells = [("oracle bias", o.bias, pb), ("oracle var", o.variance, pv)]
                if c0 == 1.0:
                    cells.append(("feasible bias", f.bias, pf))
                for tag, got, want in cells:
                    total += 1
                    if not within_band(got, want):
                        misses.append(f"{tag} e={e:g} n={n} c0={c0:g}: {got:+.4f} vs {want:+.4f}")
    return not misses, f"{total - len(misses)}/{total} cells in band" + (
        f"; misses: {misses}" if misses else ""
    )


def rate_check():
    t0 = time.perf_counter()
    ns = np.array([100, 200, 400, 800])
    rmse = []
    for n in ns:
        rep = run_monte_carlo(SINE1D, int(n), 300, 1.0, [0.0], seed=SEED, threads=1)
        rmse.append(math.sqrt(rep.row(0.0, "feasible").mse))
    slope = float(np.polyfit(np.log(ns), np.log(rmse), 1)[0])
    elapsed = time.perf_counter() - t0
    ok = -0.55 <= slope <= -0.25 and elapsed < 300
    return ok, f"log-log slope {slope:.3f} (target -0.4), {elapsed:.1f}s"


def branch_consistency():
    ns = [50, 100, 200, 500, 1000, 2000, 5000]
    uni = {n: optimal_b0(n, 1, silverman_b1(1.0, n), 1.0)[1] for n in ns}
    tri = {n: optimal_b0(n, 3, silverman_b1(1.0, n), 1.0)[1] for n in ns}
    uni_ok = all(b is Branch.BIAS for b in uni.values())
    tri_ok = all(b is Branch.VARIANCE for b in tri.values())
    detail = (
        f"d=1 picks {sorted({b.value for b in uni.values()})} (want n3b1^7); "
        f"d=3 picks {sorted({b.value for b in tri.values()})} (want n2b1^3)"
    )
    return uni_ok and tri_ok, detail


def normality():
    t0 = time.perf_counter()
    n = 2000
    b1 = silverman_b1(1.0, n)
    b0, _ = optimal_b0(n, 1, b1, 1.0)
    rep = normality_diagnostic(SINE1D, n, 500, 1.0, b0, b1, seed=SEED)
    elapsed = time.perf_counter() - t0
    ok = abs(rep.mean) <= 0.3 and 0.8 <= rep.sd <= 1.2 and elapsed < 300
    return ok, (
        f"mean {rep.mean:+.3f}, sd {rep.sd:.3f}, KS {rep.ks_distance:.3f} "
        f"(p={rep.ks_pvalue:.2f}, not gated), {elapsed:.1f}s"
    )


def rate_regime_identity():
    continuity = rate_regime(2).rate_exponent == Fraction(-2, 5) == Fraction(-6, 2 * 2 + 11)
    n = 10**6
    b1 = silverman_b1(1.0, n)
    grid = np.geomspace(1e-4, 1.0, 4001)
    best = grid[np.argmin([rn_remainder(n, 1, b, b1) for b in grid])]
    formula, _ = optimal_b0(n, 1, b1, 1.0)
    ratio = max(best / formula, formula / best)
    return continuity and ratio <= 3, (
        f"continuity {'exact' if continuity else 'broken'}; "
        f"grid minimizer {best:.4g} vs formula {formula:.4g} (ratio {ratio:.2f})"
    )


CRITERIA = [
    ("1 kernel identities", kernel_identities),
    ("2 oracle equivalence", oracle_equivalence),
    ("3 estimator identities", estimator_identities),
    ("4 univariate table reproduction", table1_reproduction),
    ("5 trivariate table soft reproduction", table2_reproduction),
    ("6 rate check d=1", rate_check),
    ("7 branch consistency", branch_consistency),
    ("8 normality diagnostic", normality),
    ("9 rate-regime identity", rate_regime_identity),
]


def line(name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}"


@pytest.mark.parametrize("name, check", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + line(name, ok, detail))
    assert ok, detail


def main():
    failures = 0
    for name, check in CRITERIA:
        ok, detail = check()
        failures += not ok
        print(line(name, ok, detail), flush=True)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
