"""Critical dissipative SQG on a square: spectral solver and numerical checks."""

from ._core import (
    Geometry,
    InequalityReport,
    NumericError,
    PreconditionError,
    SpectralField,
    b1_norm,
    boundary_ratio,
    check_names,
    heat,
    heat_kernel,
    holder_seminorm,
    interior_lipschitz,
    lambda_of_unity,
    lambda_power,
    random_family,
    read_checkpoint,
    run,
    run_check,
    square_geometry,
    truncated_constant,
    velocity,
    verify_cordoba,
    verify_kernel_bounds,
    verify_velocity_log_bound,
    verify_weight_norm_bridge,
    weighted_norm,
    write_checkpoint,
)

__all__ = [name for name in dir() if not name.startswith("_")]
