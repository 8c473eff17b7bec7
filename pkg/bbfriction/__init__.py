"""
Blackbody friction on moving, rotating polarizable particles.

Lab-frame force and heating, the co-moving frictional force, closed forms
for a single absorption line, and the velocity history of a decelerating
particle.
"""

__version__ = "0.1.0"

from .errors import (
    FrictionError,
    InvalidParameterError,
    UnsupportedEvaluationError,
    IntegrandError,
    RhsEvaluationError,
    ConfigError,
    SolverAbortError,
    StepSizeUnderflowError,
    StepLimitError
)

from .constants import PhysicalConstants, CODATA, REDUCED_UNITS

from .physics_core import (
    ModelKind,
    PolarizabilityModel,
    LorentzModel,
    DeltaResonanceModel,
    make_lorentz_model,
    make_delta_model,
    alpha_imag,
    alpha_imag_coth,
    reduced_chi,
    BathSpec,
    ParticleSpec,
    KinematicState,
    validate_dipole_conditions
)

from .quadrature import (
    QuadratureConfig,
    QuadResult,
    DEFAULT_QUADRATURE,
    integrate_finite,
    integrate_semi_infinite
)

from .radiation_forces import (
    ForceEstimate,
    ForceBreakdown,
    weight_lab,
    weight_comoving,
    kernel_K,
    force_comoving,
    force_comoving_direct,
    force_lab,
    heating_rate_lab,
    force_comoving_from_lab,
    force_nonrel,
    force_mkrtchian,
    force_scale,
    normalized_force,
    evaluate_forces
)

from .resonance import (
    ResonanceParams,
    rotation_correction_G,
    resonance_force_quadratic,
    resonance_force_exact,
    acceleration_threshold,
    acceleration_window,
    lowest_threshold,
    fig2_curves,
    linear_drag_coefficient,
    resonance_force_nonrel
)

from .dynamics import (
    SolverConfig,
    Trajectory,
    TrajectorySample,
    ForceInterpolant,
    deceleration_rhs,
    evolve,
    linear_drag_time
)

from .config import RunConfig, SweepAxis, SweepSpec, load_run_config, parse_run_config

__all__ = [
    "__version__",

    # Errors
    "FrictionError",
    "InvalidParameterError",
    "UnsupportedEvaluationError",
    "IntegrandError",
    "RhsEvaluationError",
    "ConfigError",
    "SolverAbortError",
    "StepSizeUnderflowError",
    "StepLimitError",

    # Physical inputs
    "PhysicalConstants",
    "CODATA",
    "REDUCED_UNITS",
    "ModelKind",
    "PolarizabilityModel",
    "LorentzModel",
    "DeltaResonanceModel",
    "make_lorentz_model",
    "make_delta_model",
    "alpha_imag",
    "alpha_imag_coth",
    "reduced_chi",
    "BathSpec",
    "ParticleSpec",
    "KinematicState",
    "validate_dipole_conditions",

    # Quadrature
    "QuadratureConfig",
    "QuadResult",
    "DEFAULT_QUADRATURE",
    "integrate_finite",
    "integrate_semi_infinite",

    # Forces
    "ForceEstimate",
    "ForceBreakdown",
    "weight_lab",
    "weight_comoving",
    "kernel_K",
    "force_comoving",
    "force_comoving_direct",
    "force_lab",
    "heating_rate_lab",
    "force_comoving_from_lab",
    "force_nonrel",
    "force_mkrtchian",
    "force_scale",
    "normalized_force",
    "evaluate_forces",

    # Single absorption line
    "ResonanceParams",
    "rotation_correction_G",
    "resonance_force_quadratic",
    "resonance_force_exact",
    "acceleration_threshold",
    "acceleration_window",
    "lowest_threshold",
    "fig2_curves",
    "linear_drag_coefficient",
    "resonance_force_nonrel",

    # Dynamics
    "SolverConfig",
    "Trajectory",
    "TrajectorySample",
    "ForceInterpolant",
    "deceleration_rhs",
    "evolve",
    "linear_drag_time",

    # Run configuration
    "RunConfig",
    "SweepAxis",
    "SweepSpec",
    "load_run_config",
    "parse_run_config"
]
