"""Monte Carlo harness for the two simulation models.

Every replicate draws from its own generator, spawned from the run seed by
replicate index, so a report depends only on ``(seed, settings)`` and not
on the number of worker threads.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from .bandwidth import optimal_b0, silverman_b1
from .density import asymptotic_center_and_variance, feasible_density, oracle_density
from .kernels import BIWEIGHT, KernelSpec
from .regression import LooFit, SampleSet, TrimBox, loo_nadaraya_watson, trim_mask

__all__ = [
    "ModelSpec",
    "SINE1D",
    "TRIVARIATE",
    "MODELS",
    "get_model",
    "generate",
    "true_density",
    "true_density_d2",
    "McRow",
    "McReport",
    "DensityCurves",
    "DiagnosticReport",
    "run_monte_carlo",
    "emit_density_curves",
    "normality_diagnostic",
    "resolve_threads",
    "TooManyExcludedError",
]

log = logging.getLogger(__name__)

DELTA = 0.001
MAX_EXCLUDED_FRACTION = 0.10
THREADS_ENV = "ERRDENS_THREADS"

ESTIMATORS = ("feasible", "oracle")


@dataclass(frozen=True)
class ModelSpec:
    """``Y = m(X) + eps`` with ``X ~ U[0,1]^d`` and ``eps ~ N(0,1)``."""

    name: str
    d: int
    m: Callable[[np.ndarray], np.ndarray]

    def response(self, X, eps):
        return self.m(np.asarray(X, dtype=float).reshape(-1, self.d)) + eps


def _sine1d(X):
    return 1.0 + np.sin(np.pi * X[:, 0])


def _trivariate(X):
    return 1.0 + X[:, 0] + X[:, 1] ** 2 + np.sin(np.pi * X[:, 2])


SINE1D = ModelSpec("sine1d", 1, _sine1d)
TRIVARIATE = ModelSpec("trivariate", 3, _trivariate)
MODELS = {m.name: m for m in (SINE1D, TRIVARIATE)}


def get_model(name) -> ModelSpec:
    try:
        return MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None


def true_density(e):
    return stats.norm.pdf(e)


def true_density_d2(e):
    e = np.asarray(e, dtype=float)
    return (e * e - 1.0) * stats.norm.pdf(e)


def _as_generator(rng_stream):
    if isinstance(rng_stream, np.random.Generator):
        return rng_stream
    return np.random.default_rng(rng_stream)


def generate(model: ModelSpec, n, rng_stream):
    """Draw a sample of size ``n``.

    Returns the :class:`SampleSet` and the errors ``Y - m(X)``. These are
    recomputed from ``Y`` rather than returned as drawn, so that plugging the
    true ``m`` into the residual formula reproduces them exactly.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n!r}")
    rng = _as_generator(rng_stream)
    X = rng.uniform(size=(n, model.d))
    eps = rng.standard_normal(n)
    mX = model.m(X)
    Y = mX + eps
    return SampleSet(X, Y), Y - mX


def resolve_threads(threads=None):
    """Worker count: explicit value, else ``$ERRDENS_THREADS``, else 1; 0 means all CPUs."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    if threads < 0:
        raise ValueError("threads must be >= 0")
    return threads or (os.cpu_count() or 1)


def _replicate_rngs(seed, reps):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(reps)]


@dataclass(frozen=True)
class _Replicate:
    feasible: np.ndarray
    oracle: np.ndarray
    b0: float
    b1: float


def _one_replicate(model, n, c0, e_points, mode, sigma_source, delta, k, rng):
    data, errors = generate(model, n, rng)
    mask = trim_mask(data, TrimBox.unit_cube(model.d, delta))
    if not mask.any():
        return None
    b1 = silverman_b1(float(np.std(errors, ddof=1)), n)
    b0, _ = optimal_b0(n, model.d, b1, c0)
    if mode == "oracle_regression":
        m_true = model.m(data.X)
        fit = LooFit(m_true, data.Y - m_true, np.ones(n, dtype=bool), b0)
    else:
        fit = loo_nadaraya_watson(data, b0, k)
        if sigma_source == "residuals":
            res = fit.residuals[fit.defined_mask]
            b1 = silverman_b1(float(np.std(res, ddof=1)), n)
    if not (mask & fit.defined_mask).any():
        return None
    f_hat = feasible_density(fit, mask, e_points, b1, k).values
    f_tilde = oracle_density(errors, mask, e_points, b1, k).values
    return _Replicate(f_hat, f_tilde, b0, b1)


class TooManyExcludedError(RuntimeError):
    pass


def _run_replicates(model, n, reps, c0, e_points, seed, mode, sigma_source, delta, k, threads):
    if reps < 1:
        raise ValueError("reps must be positive")
    if mode not in ("standard", "oracle_regression"):
        raise ValueError(f"unknown mode {mode!r}")
    if sigma_source not in ("errors", "residuals"):
        raise ValueError(f"unknown sigma_source {sigma_source!r}")
    e_points = np.atleast_1d(np.asarray(e_points, dtype=float))
    if e_points.size == 0:
        raise ValueError("e_points must be nonempty")

    def work(rng):
        return _one_replicate(model, n, c0, e_points, mode, sigma_source, delta, k, rng)

    rngs = _replicate_rngs(seed, reps)
    workers = resolve_threads(threads)
    if workers == 1:
        results = [work(r) for r in rngs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, rngs))

    excluded = [i for i, r in enumerate(results) if r is None]
    if len(excluded) > MAX_EXCLUDED_FRACTION * reps:
        raise TooManyExcludedError(
            f"{len(excluded)} of {reps} replicates had an empty usable set"
        )
    if excluded:
        log.warning("excluded %d replicates with an empty usable set", len(excluded))
    kept = [r for r in results if r is not None]
    return e_points, kept, excluded


@dataclass(frozen=True)
class McRow:
    e: float
    estimator: str
    bias: float
    variance: float
    mse: float


@dataclass(frozen=True)
class McReport:
    """Bias, variance and MSE of both estimators at each evaluation point.

    Variances divide by the number of replicates used, so that
    ``mse == bias**2 + variance``. ``estimates`` keeps the raw per-replicate
    values, shape ``(replicates_used, len(e_points))``.
    """

    model: str
    n: int
    reps: int
    c0: float
    seed: int
    mode: str
    e_points: np.ndarray
    rows: tuple[McRow, ...]
    b1_used: np.ndarray
    b0_used: np.ndarray
    excluded: tuple[int, ...] = ()
    estimates: dict = field(default_factory=dict, repr=False, compare=False)

    def row(self, e, estimator):
        for r in self.rows:
            if r.estimator == estimator and r.e == e:
                return r
        raise KeyError((e, estimator))


def _summarize(values, target):
    mean = values.mean(axis=0)
    bias = mean - target
    variance = np.mean((values - mean) ** 2, axis=0)
    return bias, variance, bias**2 + variance


def run_monte_carlo(
    model: ModelSpec,
    n,
    reps,
    c0,
    e_points,
    seed,
    mode="standard",
    *,
    sigma_source="errors",
    delta=DELTA,
    k: KernelSpec = BIWEIGHT,
    threads=None,
) -> McReport:
    """Monte Carlo bias/variance/MSE of the feasible and oracle estimators.

    Parameters
    ----------
    model : ModelSpec
    n, reps : int
    c0 : float
        Multiplier in the first-step bandwidth formula.
    e_points : array_like
    seed : int
    mode : {"standard", "oracle_regression"}
        ``oracle_regression`` replaces the leave-one-out fit by the true
        regression function.
    sigma_source : {"errors", "residuals"}
        Which spread feeds the Silverman bandwidth.
    delta : float
        Trim margin of the box ``[delta, 1 - delta]^d``.
    threads : int, optional
        Worker threads; results do not depend on it.
    """
    if reps < 2:
        raise ValueError("reps must be at least 2")
    e_points, kept, excluded = _run_replicates(
        model, n, reps, c0, e_points, seed, mode, sigma_source, delta, k, threads
    )
    target = true_density(e_points)
    estimates = {
        "feasible": np.array([r.feasible for r in kept]),
        "oracle": np.array([r.oracle for r in kept]),
    }
    rows = []
    for name in ESTIMATORS:
        bias, var, mse = _summarize(estimates[name], target)
        rows.extend(
            McRow(float(e), name, float(b), float(v), float(m))
            for e, b, v, m in zip(e_points, bias, var, mse)
        )
    return McReport(
        model=model.name,
        n=n,
        reps=reps,
        c0=float(c0),
        seed=seed,
        mode=mode,
        e_points=e_points,
        rows=tuple(rows),
        b1_used=np.array([r.b1 for r in kept]),
        b0_used=np.array([r.b0 for r in kept]),
        excluded=tuple(excluded),
        estimates=estimates,
    )


@dataclass(frozen=True)
class DensityCurves:
    grid: np.ndarray
    feasible: np.ndarray
    oracle: np.ndarray
    true: np.ndarray

    def sup_distance(self, window=None):
        """Max gap between the two mean curves, optionally on ``|e| <= window``."""
        keep = slice(None) if window is None else np.abs(self.grid) <= window
        return float(np.max(np.abs(self.feasible[keep] - self.oracle[keep])))


def emit_density_curves(
    model: ModelSpec, n, reps, c0, grid, seed, *, delta=DELTA, k=BIWEIGHT, threads=None
) -> DensityCurves:
    """Pointwise Monte Carlo means of both estimators on ``grid``."""
    grid, kept, _ = _run_replicates(
        model, n, reps, c0, grid, seed, "standard", "errors", delta, k, threads
    )
    return DensityCurves(
        grid=grid,
        feasible=np.mean([r.feasible for r in kept], axis=0),
        oracle=np.mean([r.oracle for r in kept], axis=0),
        true=true_density(grid),
    )


@dataclass(frozen=True)
class DiagnosticReport:
    z: np.ndarray
    mean: float
    sd: float
    ks_distance: float
    ks_pvalue: float
    center: float
    variance: float
    b0: float
    b1: float


def normality_diagnostic(
    model: ModelSpec, n, reps, e, b0, b1, seed, *, delta=DELTA, k=BIWEIGHT
) -> DiagnosticReport:
    """Standardised feasible estimates at ``e`` compared with N(0, 1).

    Each replicate gives ``sqrt(n b1) (f_hat(e) - center) / sqrt(V)`` with the
    centering and variance computed from the known error density and the
    exact probability of the trimming box.
    """
    if reps < 100:
        raise ValueError("reps must be at least 100")
    box = TrimBox.unit_cube(model.d, delta)
    center, variance = asymptotic_center_and_variance(
        true_density, true_density_d2, e, b1, box.volume, k
    )
    z = np.empty(reps)
    for r, rng in enumerate(_replicate_rngs(seed, reps)):
        data, _ = generate(model, n, rng)
        fit = loo_nadaraya_watson(data, b0, k)
        f_hat = feasible_density(fit, trim_mask(data, box), [e], b1, k).values[0]
        z[r] = np.sqrt(n * b1) * (f_hat - center) / np.sqrt(variance)
    ks = stats.kstest(z, "norm")
    return DiagnosticReport(
        z=z,
        mean=float(z.mean()),
        sd=float(z.std(ddof=1)),
        ks_distance=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        center=float(center),
        variance=float(variance),
        b0=float(b0),
        b1=float(b1),
    )
