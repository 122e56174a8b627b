"""Continued-fraction dynamics, Wilton-function evaluators, cotangent sums,
and moment estimation for g(x) = sum_{l>=1} (1 - 2{lx})/l."""

from .cf_dynamics import (
    CFExpansion,
    DEFAULT_CONFIG,
    EffectiveRationalError,
    Interval,
    NonConvergenceError,
    ToleranceConfig,
    cf_expand,
    gauss_map,
    gauss_measure,
    sample_gauss_measure,
)
from .cotangent import DistributionSummary, RationalPoint, c0, c0_sweep
from .moments import (
    MomentEstimate,
    TARGET_RATIO,
    gamma_ratio_sweep,
    h_moment,
    log_moment_calibration,
    moment,
)
from .special_fn import (
    GEval,
    bernoulli1,
    bernoulli2,
    big_a,
    f_func,
    g_func,
    h_func,
    phi1_partial,
    phi2,
)
from .wilton import PartialSumEval, WiltonEval, apply_T, ell, partial_sums, wilton

__all__ = [
    "CFExpansion",
    "DEFAULT_CONFIG",
    "DistributionSummary",
    "EffectiveRationalError",
    "GEval",
    "Interval",
    "MomentEstimate",
    "NonConvergenceError",
    "PartialSumEval",
    "RationalPoint",
    "TARGET_RATIO",
    "ToleranceConfig",
    "WiltonEval",
    "apply_T",
    "bernoulli1",
    "bernoulli2",
    "big_a",
    "c0",
    "c0_sweep",
    "cf_expand",
    "ell",
    "f_func",
    "g_func",
    "gauss_map",
    "gauss_measure",
    "gamma_ratio_sweep",
    "h_func",
    "h_moment",
    "log_moment_calibration",
    "moment",
    "partial_sums",
    "phi1_partial",
    "phi2",
    "sample_gauss_measure",
    "wilton",
]

__version__ = "0.1.0"
