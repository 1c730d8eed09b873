"""Leave-one-out Nadaraya-Watson fits, residuals and trimming."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import BIWEIGHT, KernelSpec, eval_kernel

__all__ = ["SampleSet", "TrimBox", "LooFit", "loo_nadaraya_watson", "trim_mask"]

# Rows of the n x n weight matrix handled per block; bounds peak memory.
_BLOCK_ROWS = 256


@dataclass(frozen=True)
class SampleSet:
    """Observed covariates ``X`` (n, d) and responses ``Y`` (n,)."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or Y.ndim != 1:
            raise ValueError("X must be (n, d) and Y must be (n,)")
        if X.shape[0] != Y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]} entries")
        if X.shape[0] < 2:
            raise ValueError("need at least 2 observations")
        if X.shape[1] < 1:
            raise ValueError("need at least one covariate")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("X and Y must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class TrimBox:
    """Closed axis-aligned box ``[lower, upper]`` in covariate space."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper must be vectors of equal length")
        if not np.all(lo < hi):
            raise ValueError("need lower < upper in every coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit_cube(cls, d, delta=0.001):
        """The box ``[delta, 1 - delta]^d``."""
        return cls(np.full(d, delta), np.full(d, 1.0 - delta))

    @property
    def d(self):
        return self.lower.shape[0]

    @property
    def volume(self):
        return float(np.prod(self.upper - self.lower))


@dataclass(frozen=True)
class LooFit:
    """Leave-one-out fit. Undefined entries of ``m_hat``/``residuals`` are NaN."""

    m_hat: np.ndarray
    residuals: np.ndarray
    defined_mask: np.ndarray
    b0: float

    @property
    def n_undefined(self):
        return int(np.count_nonzero(~self.defined_mask))


def _pairwise_weights(X, rows, b0, k0):
    # (len(rows), n) product-kernel weights with the self term zeroed
    z = (X[None, :, :] - X[rows, None, :]) / b0
    w = np.prod(eval_kernel(k0, z), axis=-1)
    w[np.arange(len(rows)), rows] = 0.0
    return w


def loo_nadaraya_watson(data: SampleSet, b0: float, k0: KernelSpec = BIWEIGHT) -> LooFit:
    """Leave-one-out Nadaraya-Watson estimate at every design point.

    ``k0`` is applied as a product kernel over the ``d`` covariates. A point
    whose neighbours all get zero weight is marked undefined rather than
    assigned a value.

    Parameters
    ----------
    data : SampleSet
    b0 : float
        Regression bandwidth, in covariate units.
    k0 : KernelSpec, optional
        Univariate kernel; defaults to the biweight.

    Returns
    -------
    LooFit
    """
    if not b0 > 0:
        raise ValueError(f"b0 must be positive, got {b0!r}")
    X, Y, n = data.X, data.Y, data.n
    num = np.empty(n)
    den = np.empty(n)
    for start in range(0, n, _BLOCK_ROWS):
        rows = np.arange(start, min(start + _BLOCK_ROWS, n))
        w = _pairwise_weights(X, rows, b0, k0)
        num[rows] = np.sum(w * Y, axis=1)
        den[rows] = np.sum(w, axis=1)
    defined = den > 0
    m_hat = np.full(n, np.nan)
    m_hat[defined] = num[defined] / den[defined]
    return LooFit(m_hat=m_hat, residuals=Y - m_hat, defined_mask=defined, b0=float(b0))


def trim_mask(data: SampleSet, box: TrimBox) -> np.ndarray:
    """Boolean mask of observations lying in the closed box."""
    if box.d != data.d:
        raise ValueError(f"box has dimension {box.d} but data has d={data.d}")
    return np.all((data.X >= box.lower) & (data.X <= box.upper), axis=1)
