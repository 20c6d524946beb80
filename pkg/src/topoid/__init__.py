"""Topological classification of stable linear systems from noisy data.

Identify the topological equivalence class of a stable discrete-time
linear system from a single state trajectory: least-squares estimation, a
stability-preserving projection of the estimate, the exponential decay
rate of the misclassification probability, and a seeded Monte Carlo
harness that measures that decay empirically.
"""

from .errors import (
    InsufficientExcitationError,
    InvalidInputError,
    NumericalError,
    TopoidError,
)
from .estimation import (
    LeastSquaresState,
    least_squares,
    least_squares_incremental,
    transformed_estimator,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    HorizonStats,
    ScalarMdpRow,
    a_schedule,
    build_theta,
    emit_csv,
    emit_plot,
    load_config,
    run_monte_carlo,
    validate_scalar_mdp,
)
from .kernels import backend_name
from .matops import (
    DareSolution,
    det_sign,
    is_stable,
    solve_dare,
    solve_discrete_lyapunov,
    spectral_radius,
)
from .rate import (
    RateReport,
    StrongStabilityParams,
    misclassification_rate,
    rate_bounds,
    rate_function,
    rate_function_kronecker,
    sigma_min_rate_lower_bound,
    strong_controllability_index,
    strong_stability_params,
    theoretical_bound,
    whitened_system,
)
from .system import (
    LtiSystem,
    RngStream,
    Trajectory,
    invariant_covariance,
    sample_initial_state,
    simulate,
)
from .topology import (
    Orientation,
    ScalarTopoClass,
    apply_scalar_homeomorphism,
    orientation,
    reverse_i_projection,
    scalar_class,
    scalar_conjugacy_exponent,
    topologically_equivalent,
)

__version__ = "0.1.0"

__all__ = [
    "DareSolution",
    "ExperimentConfig",
    "ExperimentResult",
    "HorizonStats",
    "InsufficientExcitationError",
    "InvalidInputError",
    "LeastSquaresState",
    "LtiSystem",
    "NumericalError",
    "Orientation",
    "RateReport",
    "RngStream",
    "ScalarMdpRow",
    "ScalarTopoClass",
    "StrongStabilityParams",
    "TopoidError",
    "Trajectory",
    "a_schedule",
    "apply_scalar_homeomorphism",
    "backend_name",
    "build_theta",
    "det_sign",
    "emit_csv",
    "emit_plot",
    "invariant_covariance",
    "is_stable",
    "least_squares",
    "least_squares_incremental",
    "load_config",
    "misclassification_rate",
    "orientation",
    "rate_bounds",
    "rate_function",
    "rate_function_kronecker",
    "reverse_i_projection",
    "run_monte_carlo",
    "sample_initial_state",
    "scalar_class",
    "scalar_conjugacy_exponent",
    "sigma_min_rate_lower_bound",
    "simulate",
    "solve_dare",
    "solve_discrete_lyapunov",
    "spectral_radius",
    "strong_controllability_index",
    "strong_stability_params",
    "theoretical_bound",
    "topologically_equivalent",
    "transformed_estimator",
    "validate_scalar_mdp",
    "whitened_system",
]
