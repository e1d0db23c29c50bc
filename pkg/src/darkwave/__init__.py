"""darkwave: dark-soliton profiles of the 1D nonlocal Gross-Pitaevskii equation.

Computes traveling dark solitons at prescribed speed for a catalog of six
nonlocal interaction potentials, by gradient descent on the residual of the
discretized profile equation, plus the associated dispersion analysis
(sonic and Landau speeds, roton minima) and energy-momentum branch data.
"""

from .dispersion import (
    DispersionReport,
    SearchConfig,
    closed_form_landau,
    landau_speed,
    omega,
    sonic_speed,
)
from .grid_ops import (
    Grid,
    apply_convolution,
    apply_first_derivative,
    apply_second_derivative,
    build_convolution,
    build_grid,
)
from .observables import (
    BranchDiagnostics,
    BranchEntry,
    BranchRecord,
    SolitonObservables,
    branch_diagnostics,
    compute_observables,
    energy,
    momentum,
    phase,
    shape_metrics,
    wavefunction,
)
from .potentials import (
    DeltaComponent,
    Family,
    PotentialSpec,
    delta_components,
    evaluate_fourier,
    evaluate_kernel,
)
from .residual import (
    SolitonProblem,
    gradient,
    jacobian_adjoint_apply,
    jacobian_apply,
    make_problem,
    objective,
    residual,
)
from .solver import (
    SolveResult,
    SolverOptions,
    SweepEntry,
    Termination,
    initial_guess,
    solve,
    sweep_lambda,
    sweep_speeds,
)

__version__ = "0.1.0"

__all__ = [
    "Family",
    "PotentialSpec",
    "DeltaComponent",
    "evaluate_fourier",
    "evaluate_kernel",
    "delta_components",
    "SearchConfig",
    "DispersionReport",
    "omega",
    "sonic_speed",
    "landau_speed",
    "closed_form_landau",
    "Grid",
    "build_grid",
    "apply_first_derivative",
    "apply_second_derivative",
    "build_convolution",
    "apply_convolution",
    "SolitonProblem",
    "make_problem",
    "residual",
    "jacobian_apply",
    "jacobian_adjoint_apply",
    "objective",
    "gradient",
    "SolverOptions",
    "SolveResult",
    "SweepEntry",
    "Termination",
    "initial_guess",
    "solve",
    "sweep_speeds",
    "sweep_lambda",
    "SolitonObservables",
    "BranchRecord",
    "BranchEntry",
    "BranchDiagnostics",
    "compute_observables",
    "phase",
    "wavefunction",
    "momentum",
    "energy",
    "shape_metrics",
    "branch_diagnostics",
    "__version__",
]
