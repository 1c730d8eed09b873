"""Bandwidth rules, rate functions and finite-sample assumption checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .kernels import BIWEIGHT
from .regression import loo_nadaraya_watson

__all__ = [
    "Branch",
    "Rule",
    "BandwidthPlan",
    "RateRegime",
    "RateReport",
    "Diagnostic",
    "AssumptionFlags",
    "silverman_b1",
    "optimal_b0",
    "b0_branch_terms",
    "rn_remainder",
    "amse_proxy",
    "rate_regime",
    "assumption_diagnostics",
    "rate_report",
    "residual_plan",
    "DIVERGENCE_THRESHOLD",
    "VANISHING_THRESHOLD",
]

# A finite-sample quantity "diverges" above this and "is O(1)" below it.
DIVERGENCE_THRESHOLD = 5.0
# ... and "is o(1)" below this one.
VANISHING_THRESHOLD = 1.0


class Branch(str, Enum):
    """Which term attains the max in the first-step bandwidth formula."""

    VARIANCE = "n2b1^3"  # (1 / (n^2 b1^3))^(1/(d+4))
    BIAS = "n3b1^7"  # (1 / (n^3 b1^7))^(1/(2d+4))


class Rule(str, Enum):
    EXPLICIT = "explicit"
    FORMULA = "silverman_b1_and_formula_b0"


@dataclass(frozen=True)
class BandwidthPlan:
    b0: float
    b1: float
    rule: Rule
    c0: float | None = None
    branch: Branch | None = None

    def __post_init__(self):
        if not (self.b0 > 0 and self.b1 > 0):
            raise ValueError("bandwidths must be positive")
        if self.rule is Rule.FORMULA and not (self.c0 is not None and 0 < self.c0 <= 1):
            raise ValueError("formula rule needs 0 < c0 <= 1")

    @classmethod
    def from_formula(cls, n, d, sigma, c0=1.0):
        b1 = silverman_b1(sigma, n)
        b0, branch = optimal_b0(n, d, b1, c0)
        return cls(b0=b0, b1=b1, rule=Rule.FORMULA, c0=c0, branch=branch)


def silverman_b1(sigma, n):
    """Rule-of-thumb density bandwidth ``1.06 sigma n^(-1/5)``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n!r}")
    return 1.06 * sigma * n ** -0.2


def b0_branch_terms(n, d, b1):
    """The two candidate orders for the first-step bandwidth."""
    first = (1.0 / (n**2 * b1**3)) ** (1.0 / (d + 4))
    second = (1.0 / (n**3 * b1**7)) ** (1.0 / (2 * d + 4))
    return first, second


def optimal_b0(n, d, b1, c0=1.0):
    """First-step bandwidth ``c0 * max{(n^2 b1^3)^(-1/(d+4)), (n^3 b1^7)^(-1/(2d+4))}``.

    Returns the bandwidth and the :class:`Branch` that attained the max.
    Ties go to :attr:`Branch.VARIANCE`.
    """
    if n < 2 or d < 1 or not b1 > 0:
        raise ValueError("need n >= 2, d >= 1, b1 > 0")
    if not 0 < c0 <= 1:
        raise ValueError(f"c0 must lie in (0, 1], got {c0!r}")
    first, second = b0_branch_terms(n, d, b1)
    if first >= second:
        return c0 * first, Branch.VARIANCE
    return c0 * second, Branch.BIAS


def _check_positive(**kw):
    for name, value in kw.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")


def rn_remainder(n, d, b0, b1):
    """Order of the cost of using estimated instead of true residuals."""
    _check_positive(n=n, d=d, b0=b0, b1=b1)
    reg = b0**4 + 1.0 / (n * b0**d)
    a = (n * b1**5) ** -0.5 + (b0**d / b1**3) ** 0.5
    c = 1.0 / b1 + (b0**d / b1**7) ** 0.5
    return b0**4 + a**2 * reg**2 + c**2 * reg**3


def amse_proxy(n, b1):
    """``b1^4 + 1/(n b1)``, the oracle estimator's AMSE up to constants."""
    _check_positive(n=n, b1=b1)
    return b1**4 + 1.0 / (n * b1)


@dataclass(frozen=True)
class RateRegime:
    """Exponents ``a`` in ``b1* ~ n^a`` and ``rate ~ n^a``, as exact fractions."""

    d: int
    b1_star_exponent: Fraction
    rate_exponent: Fraction


def rate_regime(d) -> RateRegime:
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d!r}")
    if d <= 2:
        return RateRegime(d, Fraction(-1, 5), Fraction(-2, 5))
    return RateRegime(d, Fraction(-3, 2 * d + 11), Fraction(-6, 2 * d + 11))


@dataclass(frozen=True)
class Diagnostic:
    """One finite-sample proxy for an asymptotic bandwidth condition.

    ``requirement`` is one of ``"diverges"``, ``"O(1)"`` or ``"o(1)"``.
    """

    assumption: str
    quantity: str
    value: float
    requirement: str
    satisfied: bool


def _judge(value, requirement):
    if requirement == "diverges":
        return value > DIVERGENCE_THRESHOLD
    if requirement == "O(1)":
        return value < DIVERGENCE_THRESHOLD
    return value < VANISHING_THRESHOLD


@dataclass(frozen=True)
class AssumptionFlags:
    n: int
    d: int
    b0: float
    b1: float
    diagnostics: tuple[Diagnostic, ...] = field(default_factory=tuple)

    def __getitem__(self, quantity):
        for diag in self.diagnostics:
            if diag.quantity == quantity:
                return diag
        raise KeyError(quantity)

    @property
    def violations(self):
        return [diag for diag in self.diagnostics if not diag.satisfied]


def assumption_diagnostics(n, d, b0, b1) -> AssumptionFlags:
    """Evaluate the bandwidth conditions at a given sample size.

    Asymptotic conditions have no finite-sample truth value; the numbers are
    the output and the flags are a heuristic read of them.
    """
    _check_positive(n=n, d=d, b0=b0, b1=b1)
    if n < 3:
        raise ValueError("n must be at least 3 for the log-log quantity")
    d_star = max(d + 2, 2 * d)
    rows = [
        ("A8", f"n b0^{d_star} / ln n", n * b0**d_star / math.log(n), "diverges"),
        ("A8", "ln(1/b0) / ln(ln n)", math.log(1.0 / b0) / math.log(math.log(n)), "diverges"),
        ("A9", f"n^{d + 8} b1^{7 * (d + 4)}", float(n) ** (d + 8) * b1 ** (7 * (d + 4)), "diverges"),
        ("A10", f"n b0^{d + 4}", n * b0 ** (d + 4), "O(1)"),
        ("A10", "n b0^4 b1", n * b0**4 * b1, "o(1)"),
        ("A10", f"n b0^{d} b1^3", n * b0**d * b1**3, "diverges"),
    ]
    diags = tuple(
        Diagnostic(name, q, float(v), req, bool(_judge(v, req))) for name, q, v, req in rows
    )
    return AssumptionFlags(n=n, d=d, b0=float(b0), b1=float(b1), diagnostics=diags)


@dataclass(frozen=True)
class RateReport:
    d: int
    n: int
    b1_star_exponent: Fraction
    rate_exponent: Fraction
    amse_value: float
    rn_value: float
    assumption_flags: AssumptionFlags


def rate_report(n, d, b0, b1) -> RateReport:
    regime = rate_regime(d)
    return RateReport(
        d=d,
        n=n,
        b1_star_exponent=regime.b1_star_exponent,
        rate_exponent=regime.rate_exponent,
        amse_value=amse_proxy(n, b1),
        rn_value=rn_remainder(n, d, b0, b1),
        assumption_flags=assumption_diagnostics(n, d, b0, b1),
    )


def residual_plan(data, c0=1.0, k0=BIWEIGHT, max_iter=20, rtol=1e-6):
    """Formula bandwidths with the Silverman scale taken from the residuals.

    The residual SD depends on ``b0``, which depends on ``b1``, so this
    iterates ``sd -> (b1, b0) -> residuals -> sd`` starting from the SD of
    ``Y``. Returns the plan and the final residual SD.
    """
    sigma = float(np.std(data.Y, ddof=1))
    if not sigma > 0:
        raise ValueError("responses are constant; cannot derive a bandwidth scale")
    for _ in range(max_iter):
        plan = BandwidthPlan.from_formula(data.n, data.d, sigma, c0)
        fit = loo_nadaraya_watson(data, plan.b0, k0)
        res = fit.residuals[fit.defined_mask]
        if res.size < 2:
            raise ValueError("too few defined residuals to estimate their spread")
        new_sigma = float(np.std(res, ddof=1))
        if not new_sigma > 0:
            raise ValueError("residuals are all equal; cannot derive a bandwidth scale")
        done = abs(new_sigma - sigma) <= rtol * sigma
        sigma = new_sigma
        if done:
            break
    return BandwidthPlan.from_formula(data.n, data.d, sigma, c0), sigma
