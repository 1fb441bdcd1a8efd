"""Schwarz waveform relaxation for coupled 1-D advection-diffusion-reaction equations."""

__version__ = "0.1.0"

from .errors import SWRError
from .optimizer import AlphaStarResult, OptimizationSetup, interface_coefficients, optimize_alpha, optimize_problem
from .solver import (
    ClosureRow,
    IterationTrace,
    SolverConfig,
    SpaceTimeField,
    backward_euler_sweep,
    converged_reference,
    interface_closure,
    observed_rate,
    swr_solve,
)
from .stencil import (
    ADRParameters,
    AdvectionLaw,
    CoupledProblem,
    StencilCoefficients,
    case,
    nonlinear_stencil_coefficients,
    stencil_coefficients,
)
from .symbol import (
    RootPair,
    TransmissionKind,
    TransmissionSpec,
    characteristic_roots,
    combined_convergence_check,
    contraction_factor,
    root_condition_holds,
    sample_surface,
)

__all__ = [
    "ADRParameters", "AdvectionLaw", "AlphaStarResult", "ClosureRow", "CoupledProblem", "IterationTrace",
    "OptimizationSetup", "RootPair", "SWRError", "SolverConfig", "SpaceTimeField", "StencilCoefficients",
    "TransmissionKind", "TransmissionSpec", "backward_euler_sweep", "case", "characteristic_roots",
    "combined_convergence_check", "contraction_factor", "converged_reference", "interface_closure",
    "interface_coefficients", "nonlinear_stencil_coefficients", "observed_rate", "optimize_alpha",
    "optimize_problem", "root_condition_holds", "sample_surface", "stencil_coefficients", "swr_solve",
]
