"""Prediction intervals for stationary Markov time series.

Four interval constructions around a kernel estimate of the conditional
CDF: rank-resampling bootstrap (MF, PMF) and conformal scanning (MDCP,
PMDCP), plus bandwidth selection, simulation models, and evaluation
harnesses.
"""

from .bandwidth import (
    BandwidthGrid,
    cv_select,
    default_grid,
    rule_of_thumb,
    select_bandwidths,
)
from .bootstrap import (
    BootstrapConfig,
    BootstrapResult,
    empirical_quantile,
    mf_interval,
    mf_point_predictor,
)
from .cdf import (
    ConditionalCdfModel,
    estimate,
    estimate_batch,
    estimate_loo,
    invert,
    invert_weighted,
    normalized_weight_columns,
    transform_ranks,
)
from .conformal import (
    ConformalTrace,
    TrialGrid,
    build_trial_grid,
    conformal_interval,
    mdcp_pvalue,
)
from .dgp_eval import (
    CoverageReport,
    DgpSpec,
    Innovation,
    Model,
    RollingResult,
    compute_interval,
    cvr_len,
    monte_carlo,
    oracle_futures,
    rolling_eval,
    simulate,
)
from .errors import (
    DegenerateData,
    DegenerateWeights,
    DimensionMismatch,
    EmptyAcceptedSet,
    EmptyFile,
    InvalidIndex,
    InvalidProbability,
    MarkovPIError,
    NonFiniteInput,
    OrderTooLarge,
    ParseError,
    WarmupTooShort,
)
from .kernels import (
    Bandwidths,
    gaussian_density,
    log_weight_matrix,
    product_weight,
    smooth_cdf_kernel,
)
from .series import (
    EmbeddedPairs,
    Method,
    NominalLevel,
    PredictionInterval,
    TimeSeriesSample,
    embed,
    last_predictor,
)

__version__ = "0.1.0"

__all__ = [
    "BandwidthGrid",
    "Bandwidths",
    "BootstrapConfig",
    "BootstrapResult",
    "ConditionalCdfModel",
    "ConformalTrace",
    "CoverageReport",
    "DegenerateData",
    "DegenerateWeights",
    "DgpSpec",
    "DimensionMismatch",
    "EmbeddedPairs",
    "EmptyAcceptedSet",
    "EmptyFile",
    "Innovation",
    "InvalidIndex",
    "InvalidProbability",
    "MarkovPIError",
    "Method",
    "Model",
    "NominalLevel",
    "NonFiniteInput",
    "OrderTooLarge",
    "ParseError",
    "PredictionInterval",
    "RollingResult",
    "TimeSeriesSample",
    "TrialGrid",
    "WarmupTooShort",
    "build_trial_grid",
    "compute_interval",
    "conformal_interval",
    "cv_select",
    "cvr_len",
    "default_grid",
    "embed",
    "empirical_quantile",
    "estimate",
    "estimate_batch",
    "estimate_loo",
    "gaussian_density",
    "invert",
    "invert_weighted",
    "last_predictor",
    "log_weight_matrix",
    "mdcp_pvalue",
    "mf_interval",
    "mf_point_predictor",
    "monte_carlo",
    "normalized_weight_columns",
    "oracle_futures",
    "product_weight",
    "rolling_eval",
    "rule_of_thumb",
    "select_bandwidths",
    "simulate",
    "smooth_cdf_kernel",
    "transform_ranks",
]
