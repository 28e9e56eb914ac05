"""Structure-preserving solver for a spatially nonlocal SIR system.

Densities of susceptible, infected, and recovered individuals evolve
on a uniform rectangular grid; infections couple through a disk
average of the infected density weighted by a triangular-radial,
shifted-sine-angular kernel.  The package provides disk cubature
rules, positivity-aware off-grid interpolation, SSP time steppers with
provable step-size bounds, per-step structural audits, and an
experiment harness with a CLI.
"""

from . import backend
from .experiments import (
    BoundsRow,
    ConvergenceRow,
    CubatureRow,
    ExperimentConfig,
    bounds_table,
    convergence_table,
    cubature_error_row,
    cubature_error_study,
    empirical_critical_tau,
    error_norm,
    initial_state,
    intensity_integral_exact,
    run_simulation,
    write_bounds_csv,
    write_convergence_csv,
    write_cubature_csv,
)
from .interpolation import (
    Field,
    Grid,
    InterpMethod,
    build_sampler,
    read_field_csv,
    sample,
    sample_many,
    write_field_csv,
)
from .model import Kernel, Params, State, TransmissionOperator, assemble_T, rhs
from .properties import PropertyReport, check_step, write_report_csv
from .quadrature import (
    CubatureRule,
    gauss_legendre_unit,
    integrate,
    make_rule,
    polar_rule,
    product_rule,
    rule_to_csv,
)
from .stepping import (
    MAX_SIMULATION_STEPS,
    SSPRK22,
    SSPRK33,
    SSPRK104,
    WORST_CASE_MASS,
    RKMethod,
    SimulationResult,
    StepBounds,
    adaptive_bound,
    euler_step,
    integral_step,
    method_registry,
    simulate,
    ssp_rk_step,
    step_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsRow",
    "ConvergenceRow",
    "CubatureRow",
    "CubatureRule",
    "ExperimentConfig",
    "Field",
    "Grid",
    "InterpMethod",
    "Kernel",
    "MAX_SIMULATION_STEPS",
    "Params",
    "PropertyReport",
    "RKMethod",
    "SSPRK104",
    "SSPRK22",
    "SSPRK33",
    "SimulationResult",
    "State",
    "StepBounds",
    "TransmissionOperator",
    "WORST_CASE_MASS",
    "adaptive_bound",
    "assemble_T",
    "backend",
    "bounds_table",
    "build_sampler",
    "check_step",
    "convergence_table",
    "cubature_error_row",
    "cubature_error_study",
    "empirical_critical_tau",
    "error_norm",
    "euler_step",
    "gauss_legendre_unit",
    "initial_state",
    "integral_step",
    "integrate",
    "intensity_integral_exact",
    "make_rule",
    "method_registry",
    "polar_rule",
    "product_rule",
    "read_field_csv",
    "rhs",
    "rule_to_csv",
    "run_simulation",
    "sample",
    "sample_many",
    "simulate",
    "ssp_rk_step",
    "step_bounds",
    "write_bounds_csv",
    "write_convergence_csv",
    "write_cubature_csv",
    "write_field_csv",
    "write_report_csv",
]
