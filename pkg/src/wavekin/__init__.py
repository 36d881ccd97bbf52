"""Implicit finite-volume solver for the isotropic 3-wave kinetic equation.

The equation is solved in conservative form for the rescaled energy density
on a truncated uniform wavenumber grid; the quadratic nonlocal collision
flux is advanced with adaptive embedded TR-BDF2 and a Newton solver on the
analytic Jacobian.
"""

__version__ = "0.1.0"

from . import _kernels
from .collision import (
    CollisionKernel,
    CollisionSystem,
    State,
    flux_divergence,
    flux_half,
    rhs,
    rhs_jacobian,
)
from .diagnostics import DecayFit, Phase, convergence_study, detect_phases, fit_decay, moment
from .errors import (
    AbortedAtMinStep,
    ConfigurationError,
    InsufficientSamples,
    NonConvergence,
    NonPositiveValue,
    SolverError,
    WavekinError,
)
from .grid import Grid, build_grid
from .scenarios import SCENARIOS, Scenario, eval_g0, get_scenario, project_initial
from .stepper import (
    StepperConfig,
    StepperStats,
    Tableau,
    TRBDF2,
    advance,
    backward_euler_step,
    newton_solve,
    trbdf2_step,
)

__all__ = [
    "__version__",
    "_kernels",
    "Grid",
    "build_grid",
    "State",
    "CollisionKernel",
    "CollisionSystem",
    "flux_half",
    "flux_divergence",
    "rhs",
    "rhs_jacobian",
    "Tableau",
    "TRBDF2",
    "StepperConfig",
    "StepperStats",
    "newton_solve",
    "backward_euler_step",
    "trbdf2_step",
    "advance",
    "Scenario",
    "SCENARIOS",
    "get_scenario",
    "eval_g0",
    "project_initial",
    "moment",
    "fit_decay",
    "detect_phases",
    "convergence_study",
    "DecayFit",
    "Phase",
    "WavekinError",
    "ConfigurationError",
    "SolverError",
    "NonConvergence",
    "AbortedAtMinStep",
    "InsufficientSamples",
    "NonPositiveValue",
]
