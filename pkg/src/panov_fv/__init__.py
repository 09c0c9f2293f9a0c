"""Finite-volume solver for conservation laws u_t + div g(beta(x, u)) = 0.

The flux is a monotone profile g composed with a function beta(x, u) that
is increasing in u but may jump in x, including infinitely many jumps
accumulating at a point.  A Godunov scheme evaluated on interface values
of beta handles that roughness without regularization; in 2D the scheme
is applied by dimensional splitting.

Public layers:

- :mod:`panov_fv.flux_model` -- flux profiles, beta families, the exact
  Godunov interface flux, CFL constants
- :mod:`panov_fv.grid` -- uniform grids, fields, boundary policies,
  sampling, CSV export
- :mod:`panov_fv.solver` -- time-step selection and the split scheme
- :mod:`panov_fv.diagnostics` -- total variation, L1 errors, entropy
  residuals, conservation defects, EOC tables
- :mod:`panov_fv.experiments` -- ready-made benchmark problems and
  convergence drivers
- :mod:`panov_fv.invariants` -- randomized structural property suite
- :mod:`panov_fv.cli` -- the ``panov-fv`` command
"""

from .flux_model import (
    Affine2D,
    BUILTIN_G,
    BracketFailure,
    CflConstants,
    FluxModel,
    GComponent,
    GeneralMonotone1D,
    beta_eval,
    beta_field_values,
    cfl_constants,
    godunov_scalar_flux,
    godunov_values,
    k_alpha,
)
from .grid import (
    BoundaryPolicy,
    Dirichlet,
    Field,
    Grid,
    NonFiniteSample,
    Outflow,
    Periodic,
    as_point_function,
    export_csv,
    pad,
    pad_array,
    sample_initial,
    sample_r,
)
from .solver import (
    BoundsEstimate,
    CflViolation,
    DegenerateFlux,
    SolverConfig,
    estimate_bounds,
    interface_fluxes,
    run,
    select_dt,
    step_1d,
    step_2d,
    step_2d_parts,
)
from .diagnostics import (
    DiagnosticsReport,
    GridMismatch,
    conservation_defect,
    entropy_residual,
    eoc,
    l1_distance,
    report_dict,
    sample_alphas,
    time_continuity,
    tv_1d,
    tv_2d,
    tv_of_beta,
    write_report,
)
from .experiments import (
    AccumulatingStep,
    ConvergenceTable,
    DimensionalityMismatch,
    ExperimentSpec,
    PROBLEMS,
    make_ex51,
    make_ex52,
    make_steady,
    restrict_1d,
    run_1d_reference,
    run_convergence,
)
from .invariants import PropertyResult, run_all

__version__ = "0.1.0"

__all__ = [
    "Affine2D",
    "AccumulatingStep",
    "BUILTIN_G",
    "BoundaryPolicy",
    "BoundsEstimate",
    "BracketFailure",
    "CflConstants",
    "CflViolation",
    "ConvergenceTable",
    "DegenerateFlux",
    "DiagnosticsReport",
    "DimensionalityMismatch",
    "Dirichlet",
    "ExperimentSpec",
    "Field",
    "FluxModel",
    "GComponent",
    "GeneralMonotone1D",
    "Grid",
    "GridMismatch",
    "NonFiniteSample",
    "Outflow",
    "PROBLEMS",
    "Periodic",
    "PropertyResult",
    "SolverConfig",
    "as_point_function",
    "beta_eval",
    "beta_field_values",
    "cfl_constants",
    "conservation_defect",
    "entropy_residual",
    "eoc",
    "estimate_bounds",
    "export_csv",
    "godunov_scalar_flux",
    "godunov_values",
    "interface_fluxes",
    "k_alpha",
    "l1_distance",
    "make_ex51",
    "make_ex52",
    "make_steady",
    "pad",
    "pad_array",
    "report_dict",
    "restrict_1d",
    "run",
    "run_1d_reference",
    "run_all",
    "run_convergence",
    "sample_alphas",
    "sample_initial",
    "sample_r",
    "select_dt",
    "step_1d",
    "step_2d",
    "step_2d_parts",
    "time_continuity",
    "tv_1d",
    "tv_2d",
    "tv_of_beta",
    "write_report",
    "__version__",
]
