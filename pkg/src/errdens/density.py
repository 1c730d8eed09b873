"""Kernel estimators of the regression error density.

The feasible estimator smooths leave-one-out residuals of the trimmed-in
observations. The oracle estimator does the same with the true errors and
is only available when the data were simulated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import BIWEIGHT, KernelSpec, eval_kernel
from .regression import LooFit

__all__ = [
    "DensityCurve",
    "EmptyTrimSetError",
    "default_grid",
    "feasible_density",
    "oracle_density",
    "kernel_density",
    "asymptotic_center_and_variance",
    "trapezoid_integral",
]

DEFAULT_GRID_SIZE = 512


class EmptyTrimSetError(ValueError):
    pass


@dataclass(frozen=True)
class DensityCurve:
    """Density estimate evaluated at ``grid``.

    ``n_used`` counts the observations entering the estimate and
    ``n_excluded`` those trimmed-in points dropped for an undefined fit.
    """

    grid: np.ndarray
    values: np.ndarray
    b1: float
    n_used: int
    n_excluded: int = 0

    def integral(self):
        return trapezoid_integral(self.grid, self.values)


def trapezoid_integral(x, y):
    return float(np.trapezoid(y, x)) if hasattr(np, "trapezoid") else float(np.trapz(y, x))


def default_grid(sample, b1, k: KernelSpec = BIWEIGHT, size=DEFAULT_GRID_SIZE):
    """Equispaced grid spanning the full support of the estimate."""
    sample = np.asarray(sample, dtype=float)
    sample = sample[np.isfinite(sample)]
    reach = b1 * k.support_radius
    return np.linspace(sample.min() - reach, sample.max() + reach, size)


def kernel_density(sample, e_points, b1, k1: KernelSpec = BIWEIGHT):
    """Plain kernel density estimate ``sum_i K((x_i - e)/b1) / (len(sample) b1)``.

    Summation runs over the sample in index order for every ``e``.
    """
    if not b1 > 0:
        raise ValueError(f"b1 must be positive, got {b1!r}")
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise EmptyTrimSetError("empty trim set: no usable observations")
    e = np.atleast_1d(np.asarray(e_points, dtype=float))
    u = (sample[None, :] - e[:, None]) / b1
    return np.sum(eval_kernel(k1, u), axis=1) / (sample.size * b1)


def feasible_density(fit: LooFit, mask, e_points, b1, k1: KernelSpec = BIWEIGHT) -> DensityCurve:
    """Two-step estimate from residuals of trimmed-in, defined observations.

    The normalising count is the number of points that are both trimmed-in
    and have a defined fit, so the result integrates to one.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != fit.defined_mask.shape:
        raise ValueError("mask length does not match the fit")
    use = mask & fit.defined_mask
    values = kernel_density(fit.residuals[use], e_points, b1, k1)
    return DensityCurve(
        grid=np.atleast_1d(np.asarray(e_points, dtype=float)),
        values=values,
        b1=float(b1),
        n_used=int(use.sum()),
        n_excluded=int(np.count_nonzero(mask & ~fit.defined_mask)),
    )


def oracle_density(errors, mask, e_points, b1, k1: KernelSpec = BIWEIGHT) -> DensityCurve:
    """Same construction as :func:`feasible_density` on the true errors."""
    errors = np.asarray(errors, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != errors.shape:
        raise ValueError("mask length does not match the errors")
    values = kernel_density(errors[mask], e_points, b1, k1)
    return DensityCurve(
        grid=np.atleast_1d(np.asarray(e_points, dtype=float)),
        values=values,
        b1=float(b1),
        n_used=int(mask.sum()),
    )


def asymptotic_center_and_variance(f, f2, e, b1, p_x0, k1: KernelSpec = BIWEIGHT):
    """Centering term and limiting variance of ``sqrt(n b1) (f_hat(e) - center)``.

    Parameters
    ----------
    f, f2 : callable
        True error density and its second derivative.
    e : float
    b1 : float
    p_x0 : float
        Probability that a covariate falls in the trimming box.
    k1 : KernelSpec

    Returns
    -------
    center, variance : float
    """
    if not 0 < p_x0 <= 1:
        raise ValueError(f"p_x0 must lie in (0, 1], got {p_x0!r}")
    fe = float(f(e))
    center = fe + 0.5 * b1**2 * float(f2(e)) * k1.moment_v2
    variance = fe * k1.l2_norm / p_x0
    return center, variance
