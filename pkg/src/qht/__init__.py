"""Estimation from coarsely quantized heavy-tailed data.

Three estimation problems share one measurement pipeline (truncate,
dither, quantize): covariance estimation, sparse regression through
quantized surrogates, and low-rank matrix completion. The harness
subpackage turns each into a runnable error-vs-sample-size experiment.
"""
from .covest import (
    CovEstimate,
    CovEstimatorSpec,
    ablation_estimators,
    estimate_covariance,
    hard_threshold,
    threshold_covariance,
)
from .lowrank import (
    QmcEstimate,
    QmcProblem,
    QmcSolverOptions,
    quantize_mc_observations,
    solve_qmc,
    svt,
)
from .quantize import (
    OneBitSpec,
    QuantizerSpec,
    TruncationRule,
    no_truncation,
    one_bit_quantize_covariate,
    one_bit_quantize_response,
    quantize_to_grid,
    quantize_vector,
    sample_dither,
    sign_pm1,
    truncate,
    uniform_quantize,
)
from .randgen import (
    CustomCovarianceT,
    GaussianIdentity,
    LowRankSpec,
    McObservations,
    NoiseModel,
    SignalSpec,
    StudentTScaled,
    covariance_of,
    sample_covariates,
    sample_lowrank_matrix,
    sample_mc_observations,
    sample_sparse_signal,
)
from .sparse import (
    QcsEstimate,
    QcsSolverOptions,
    SurrogatePair,
    build_surrogates_full_covariate,
    build_surrogates_one_bit,
    build_surrogates_quantized_covariate,
    project_l1_ball,
    soft_threshold,
    solve_constrained_lasso,
    solve_generalized_lasso,
    solve_nonconvex_constrained,
    spectral_norm_sym,
    stationarity_residual,
    surrogate_objective,
)
from .streams import substream

__version__ = "0.1.0"

__all__ = [
    "CovEstimate",
    "CovEstimatorSpec",
    "ablation_estimators",
    "estimate_covariance",
    "hard_threshold",
    "threshold_covariance",
    "QmcEstimate",
    "QmcProblem",
    "QmcSolverOptions",
    "quantize_mc_observations",
    "solve_qmc",
    "svt",
    "OneBitSpec",
    "QuantizerSpec",
    "TruncationRule",
    "no_truncation",
    "one_bit_quantize_covariate",
    "one_bit_quantize_response",
    "quantize_to_grid",
    "quantize_vector",
    "sample_dither",
    "sign_pm1",
    "truncate",
    "uniform_quantize",
    "CustomCovarianceT",
    "GaussianIdentity",
    "LowRankSpec",
    "McObservations",
    "NoiseModel",
    "SignalSpec",
    "StudentTScaled",
    "covariance_of",
    "sample_covariates",
    "sample_lowrank_matrix",
    "sample_mc_observations",
    "sample_sparse_signal",
    "QcsEstimate",
    "QcsSolverOptions",
    "SurrogatePair",
    "build_surrogates_full_covariate",
    "build_surrogates_one_bit",
    "build_surrogates_quantized_covariate",
    "project_l1_ball",
    "soft_threshold",
    "solve_constrained_lasso",
    "solve_generalized_lasso",
    "solve_nonconvex_constrained",
    "spectral_norm_sym",
    "stationarity_residual",
    "surrogate_objective",
    "substream",
    "__version__",
]
