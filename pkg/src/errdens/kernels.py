"""Compactly supported smoothing kernels with closed-form derivatives.

Only the biweight (quartic) family is provided. Multivariate kernels are
built as products of the univariate one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

__all__ = [
    "KernelFamily",
    "KernelSpec",
    "BIWEIGHT",
    "MomentCheck",
    "MomentReport",
    "QuadratureError",
    "eval_kernel",
    "eval_derivative",
    "eval_product",
    "verify_moments",
]


class KernelFamily(str, Enum):
    BIWEIGHT = "biweight"


class QuadratureError(RuntimeError):
    """Raised when two quadrature orders disagree beyond tolerance."""

    def __init__(self, name, residual):
        super().__init__(f"quadrature for {name} did not converge (residual {residual:.3e})")
        self.name = name
        self.residual = residual


def _biweight(u):
    return 0.9375 * (1.0 - u * u) ** 2


def _biweight_d1(u):
    return -3.75 * u * (1.0 - u * u)


def _biweight_d2(u):
    return -3.75 * (1.0 - 3.0 * u * u)


def _biweight_d3(u):
    return 22.5 * u


_FORMULAS: dict[KernelFamily, tuple[Callable, ...]] = {
    KernelFamily.BIWEIGHT: (_biweight, _biweight_d1, _biweight_d2, _biweight_d3),
}


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric univariate kernel supported on ``[-support_radius, support_radius]``.

    Attributes
    ----------
    family : KernelFamily
    support_radius : float
    eval_order : int
        Highest derivative order available in closed form.
    moment_v2 : float
        Second moment, ``int v**2 K(v) dv``.
    l2_norm : float
        Squared L2 norm, ``int K(v)**2 dv``.
    """

    family: KernelFamily
    support_radius: float
    eval_order: int
    moment_v2: float
    l2_norm: float
    _formulas: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_formulas", _FORMULAS[self.family])

    def __call__(self, u):
        return eval_kernel(self, u)

    def derivative(self, order, u):
        return eval_derivative(self, order, u)


BIWEIGHT = KernelSpec(
    family=KernelFamily.BIWEIGHT,
    support_radius=1.0,
    eval_order=3,
    moment_v2=1.0 / 7.0,
    l2_norm=5.0 / 7.0,
)


def _truncated(k: KernelSpec, order: int, u):
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < k.support_radius
    out = np.where(inside, k._formulas[order](np.where(inside, u, 0.0)), 0.0)
    return out if out.ndim else float(out)


def eval_kernel(k: KernelSpec, u):
    """Evaluate ``K(u)``; exactly zero outside the open support.

    Accepts scalars or arrays and returns the same shape.
    """
    return _truncated(k, 0, u)


def eval_derivative(k: KernelSpec, order: int, u):
    """Closed-form derivative ``K^(order)(u)`` for ``order`` in ``1..k.eval_order``.

    Values at and beyond the support boundary are 0, including for the
    second derivative of the biweight whose one-sided limit at +-1 is 7.5.
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= k.eval_order:
        raise ValueError(
            f"unsupported derivative order {order!r} for {k.family.value} "
            f"(available: 1..{k.eval_order})"
        )
    return _truncated(k, int(order), u)


def eval_product(k: KernelSpec, z):
    """Product kernel ``prod_j K(z_j)``.

    ``z`` has its coordinates on the last axis, so a ``(..., d)`` array gives
    a ``(...)`` array of values.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim == 0 or z.shape[-1] == 0:
        raise ValueError("eval_product needs at least one coordinate")
    out = np.prod(eval_kernel(k, z), axis=-1)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class MomentCheck:
    name: str
    value: float
    expected: float
    passed: bool

    @property
    def error(self):
        return abs(self.value - self.expected)


@dataclass(frozen=True)
class MomentReport:
    family: KernelFamily
    tol: float
    checks: tuple[MomentCheck, ...]

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c for c in self.checks if not c.passed]


_GL_NODES = 128


def _gauss_legendre(fn, radius, nodes):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return float(np.sum(w * fn(radius * x)) * radius)


def verify_moments(k: KernelSpec, tol: float = 1e-9) -> MomentReport:
    """Integrate the kernel moment identities numerically.

    Uses 128-node Gauss-Legendre over the exact support, cross-checked
    against a 64-node rule. The integrands are polynomial on the support so
    both rules are exact up to rounding; disagreement beyond ``tol`` raises
    :class:`QuadratureError`.

    Derivative integrals use the pointwise closed-form derivatives, i.e. the
    classical integral over the open support with no boundary jump terms.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    r = k.support_radius
    integrands = [
        ("int K", lambda v: eval_kernel(k, v), 1.0),
        ("int v K", lambda v: v * eval_kernel(k, v), 0.0),
        ("int v^2 K", lambda v: v * v * eval_kernel(k, v), k.moment_v2),
        ("int K^2", lambda v: eval_kernel(k, v) ** 2, k.l2_norm),
    ]
    for ell in range(1, k.eval_order + 1):
        integrands.append(
            (f"int K^({ell})", lambda v, ell=ell: eval_derivative(k, ell, v), 0.0)
        )
    for ell in range(2, k.eval_order + 1):
        integrands.append(
            (f"int v K^({ell})", lambda v, ell=ell: v * eval_derivative(k, ell, v), 0.0)
        )

    checks = []
    for name, fn, expected in integrands:
        value = _gauss_legendre(fn, r, _GL_NODES)
        residual = abs(value - _gauss_legendre(fn, r, _GL_NODES // 2))
        if residual > tol:
            raise QuadratureError(name, residual)
        checks.append(MomentCheck(name, value, expected, abs(value - expected) <= tol))
    return MomentReport(k.family, tol, tuple(checks))
