"""Numerical laboratory for the optimality of Grover search.

Simulates Grover's algorithm exactly and evaluates the query lower-bound chain
(divergence sums, the arc-improved bound, state-discrimination ceilings and the
S-oracle parallel bound) on concrete algorithms.
"""
from .analytic import (
    AngleModel,
    IterationOptimum,
    RestartPlan,
    lower_bound_T,
    optimal_iterations,
    restart_continuum,
    restart_optimum,
    rotation_angle,
    success_after,
)
from .bounds import (
    ArcPath,
    BoundReport,
    DomainError,
    crude_bound,
    divergence_sum,
    improvement_f,
    jensen_rhs,
    minimal_path_length,
    query_mass,
    success_ceiling,
)
from .core import (
    OracleSpec,
    QState,
    ReducedState,
    apply_diffusion,
    apply_oracle,
    empty_oracle_run,
    grover_iterate,
    init_uniform,
    reduced_step,
    success_probability,
)

__version__ = "0.1.0"
