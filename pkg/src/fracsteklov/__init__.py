"""Finite-difference solver for time-fractional diffusion with Steklov nonlocal
boundary conditions of the second kind."""

from .analysis import (
    StabilityCase,
    StabilityVerdict,
    classify_stability,
    convergence_order,
    delta_roots,
    transform_field,
    transform_params,
    transform_problem,
)
from .caputo import WeightTable, caputo_apply, compute_weights
from .core import GridSpec, ProblemSpec, SolutionHistory, build_grid, c_norm, error_field, l2_norm
from .estimator import FractionalDiffusionSolver
from .mms import ManufacturedProblem, exact_layer, make_problem
from .stepper import DegenerateSystem, StepSystem, advance, assemble_step, solve_step
from .study import StudyConfig, StudyReport, emit_report, parse_report, run_study

__version__ = "0.1.0"

__all__ = [
    "StabilityCase",
    "StabilityVerdict",
    "classify_stability",
    "convergence_order",
    "delta_roots",
    "transform_field",
    "transform_params",
    "transform_problem",
    "WeightTable",
    "caputo_apply",
    "compute_weights",
    "GridSpec",
    "ProblemSpec",
    "SolutionHistory",
    "build_grid",
    "c_norm",
    "error_field",
    "l2_norm",
    "FractionalDiffusionSolver",
    "ManufacturedProblem",
    "exact_layer",
    "make_problem",
    "DegenerateSystem",
    "StepSystem",
    "advance",
    "assemble_step",
    "solve_step",
    "StudyConfig",
    "StudyReport",
    "emit_report",
    "parse_report",
    "run_study",
]
