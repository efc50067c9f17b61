"""Two-phase boundary-element transmission solver.

Exposes curve construction, boundary discretization, the damped fixed-point
solver for the general transmission problem, the Newton/continuation solver
for the linear-plus-perturbation problem, and the closed-form concentric
benchmark used to cross-check both.
"""

from ._core import (
    Boundary,
    BranchPoint,
    CapacityError,
    ConfigError,
    ContinuationResult,
    ConvergenceError,
    Curve,
    DensityState,
    GeometryError,
    LinearAlgebraError,
    NearFieldError,
    NonInvertibleError,
    PerturbState,
    PerturbedProblem,
    RadialProblem,
    ScalarBC,
    SolveReport,
    TransmissionProblem,
    discretize,
    equilibrium_constant,
    gamma_fundamental,
    gamma_fundamental_prime,
    radial_outer_field,
    radial_roots,
    radial_small_roots,
)

__all__ = [
    "Boundary",
    "BranchPoint",
    "CapacityError",
    "ConfigError",
    "ContinuationResult",
    "ConvergenceError",
    "Curve",
    "DensityState",
    "GeometryError",
    "LinearAlgebraError",
    "NearFieldError",
    "NonInvertibleError",
    "PerturbState",
    "PerturbedProblem",
    "RadialProblem",
    "ScalarBC",
    "SolveReport",
    "TransmissionProblem",
    "discretize",
    "equilibrium_constant",
    "gamma_fundamental",
    "gamma_fundamental_prime",
    "radial_outer_field",
    "radial_roots",
    "radial_small_roots",
]

__version__ = "0.1.0"
