"""Doubly adaptive importance sampling for Gaussian approximation of unnormalized densities."""

from .baselines import NgviConfig, ngvi_step, run_ngvi, run_plain_ais
from .core import DaisConfig, IterationRecord, RunReport, StopReason, dais_step, repair_covariance, run_dais
from .data import LogisticRegressionData, load_logistic_csv, synthetic_logistic_data, write_logistic_csv
from .errors import (
    CholeskyFailure,
    ConfigError,
    DaisError,
    DimensionMismatch,
    HessianUnavailable,
    LabelError,
    NoConvergence,
    NonFiniteDensity,
    ParseError,
    RaggedRows,
)
from .gaussian import (
    GaussianParams,
    damped_gaussian_oracle,
    gaussian_grad_log_density,
    gaussian_log_density,
    gaussian_new,
    gaussian_sample,
    standard_normal,
)
from .importance import (
    DampingSolution,
    ParticleBatch,
    build_batch,
    elbo_estimate,
    ess_from_phi,
    naive_moment_estimates,
    solve_damping,
    normalized_weights,
    stein_moment_estimates,
)
from .targets import (
    TargetModel,
    banana_target,
    correlated_gaussian_target,
    laplace_init,
    logistic_target,
    mixture_target,
    sine_2d_target,
    target_from_gaussian,
)

__version__ = "0.1.0"
