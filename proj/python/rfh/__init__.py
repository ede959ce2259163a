"""Python access to the rfh engine: spectral models, potentials, critical points and Z/2 complexes."""

from ._rfh import (
    Potential,
    RfhError,
    SpectralModel,
    action,
    build_model,
    compute_complex,
    continuation,
    find_critical_points,
    flow,
    kernel_minimizer,
    potential,
    report,
    run_pipeline,
    validate_config,
)

__all__ = [
    "Potential",
    "RfhError",
    "SpectralModel",
    "action",
    "build_model",
    "compute_complex",
    "continuation",
    "find_critical_points",
    "flow",
    "kernel_minimizer",
    "potential",
    "report",
    "run_pipeline",
    "validate_config",
]
