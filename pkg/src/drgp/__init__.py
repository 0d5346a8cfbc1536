"""Distributionally robust Gaussian process regression on a spectral basis.

The package computes the equilibrium of a minimax estimation game: an
affine estimator against an adversary who perturbs a Gaussian model inside
a weighted transport ball around the nominal prior-plus-noise covariance.
"""

__version__ = "0.1.0"

from .analysis import (
    DistanceReport,
    correlation_from_covariance,
    foerstner_distance,
    prior_posterior_distance,
)
from .config import ExperimentConfig, load_config, parse_config, serialize_config
from .errors import (
    ConfigError,
    DegenerateGradientError,
    OracleConvergenceError,
    SingularModelError,
)
from .gelbrich import (
    GelbrichBall,
    contains,
    gelbrich_distance_sq,
    joint_ball,
    linear_oracle,
    psd_sqrt,
    weighted_gelbrich_sq,
)
from .model import (
    AffineEstimator,
    DesignPoints,
    JointGaussian,
    ObservationMap,
    affine_risk,
    bayes_risk_gradient,
    design_points,
    field_second_moments,
    marginal_intervals,
    mmse_value,
    nominal_covariance,
    observation_map,
    optimal_affine_estimator,
    posterior_coefficient_gaussian,
    sample_paths,
    signal_block_posterior,
)
from .operators import SpectralOperator, apply_to_coefficients, make_operator
from .solver import (
    EquilibriumResult,
    SolverConfig,
    determinant_diagnostic,
    invertibility_guard,
    solve_equilibrium,
    truncation_convergence,
)
from .spectral import (
    PriorSpectrum,
    SpectralBasis,
    WeightSequence,
    build_dirichlet_basis_1d,
    evaluate_basis,
    matern_coefficients,
    roughness_weights,
)

__all__ = [
    "__version__",
    "AffineEstimator",
    "ConfigError",
    "DegenerateGradientError",
    "DesignPoints",
    "DistanceReport",
    "EquilibriumResult",
    "ExperimentConfig",
    "GelbrichBall",
    "JointGaussian",
    "ObservationMap",
    "OracleConvergenceError",
    "PriorSpectrum",
    "SingularModelError",
    "SolverConfig",
    "SpectralBasis",
    "SpectralOperator",
    "WeightSequence",
    "affine_risk",
    "apply_to_coefficients",
    "bayes_risk_gradient",
    "build_dirichlet_basis_1d",
    "contains",
    "correlation_from_covariance",
    "design_points",
    "determinant_diagnostic",
    "evaluate_basis",
    "field_second_moments",
    "foerstner_distance",
    "gelbrich_distance_sq",
    "invertibility_guard",
    "joint_ball",
    "linear_oracle",
    "load_config",
    "make_operator",
    "marginal_intervals",
    "matern_coefficients",
    "mmse_value",
    "nominal_covariance",
    "observation_map",
    "optimal_affine_estimator",
    "parse_config",
    "posterior_coefficient_gaussian",
    "prior_posterior_distance",
    "psd_sqrt",
    "roughness_weights",
    "sample_paths",
    "serialize_config",
    "signal_block_posterior",
    "solve_equilibrium",
    "truncation_convergence",
    "weighted_gelbrich_sq",
]
