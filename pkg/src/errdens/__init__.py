"""Two-step kernel estimation of a regression error density."""

from .bandwidth import (
    AssumptionFlags,
    BandwidthPlan,
    Branch,
    RateRegime,
    RateReport,
    amse_proxy,
    assumption_diagnostics,
    optimal_b0,
    rate_regime,
    rate_report,
    residual_plan,
    rn_remainder,
    silverman_b1,
)
from .density import (
    DensityCurve,
    EmptyTrimSetError,
    asymptotic_center_and_variance,
    default_grid,
    feasible_density,
    oracle_density,
)
from .kernels import (
    BIWEIGHT,
    KernelSpec,
    eval_derivative,
    eval_kernel,
    eval_product,
    verify_moments,
)
from .regression import LooFit, SampleSet, TrimBox, loo_nadaraya_watson, trim_mask
from .simulation import (
    SINE1D,
    TRIVARIATE,
    ModelSpec,
    McReport,
    emit_density_curves,
    generate,
    get_model,
    normality_diagnostic,
    run_monte_carlo,
)

__version__ = "0.1.0"
