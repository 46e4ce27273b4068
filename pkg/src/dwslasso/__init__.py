"""Dynamic working-set solver toolkit for l1-regularized least squares.

The package generates compressed-sensing style instances, solves them with a
dynamic working-set outer loop (plus doubling, modified, and full-solve
comparators), verifies solutions through subgradient certificates, and traces
every run for benchmarking.
"""

from .certify import (Certificate, ContractionRecord, DescentReport,
                      LineMinimum, build_descent, check_global,
                      contraction_check, line_minimizer,
                      optimum_lower_bound_check, zeta_gamma)
from .dws import (DwsConfig, RunResult, TraceRecord, init_working_set,
                  next_tau, run_dws, violating_set)
from .errors import FormatError, NumericalError
from .instance import (GeneratorConfig, Instance, generate, read_instance,
                       write_instance)
from .solver import (RestrictedSolution, SolverConfig, solve_full_oracle,
                     solve_restricted)
from .strategies import STRATEGIES, doubling_next_ws, modified_dws_next, \
    run_strategy

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "ContractionRecord",
    "DescentReport",
    "DwsConfig",
    "FormatError",
    "GeneratorConfig",
    "Instance",
    "LineMinimum",
    "NumericalError",
    "RestrictedSolution",
    "RunResult",
    "STRATEGIES",
    "SolverConfig",
    "TraceRecord",
    "build_descent",
    "check_global",
    "contraction_check",
    "doubling_next_ws",
    "generate",
    "init_working_set",
    "line_minimizer",
    "modified_dws_next",
    "next_tau",
    "optimum_lower_bound_check",
    "read_instance",
    "run_dws",
    "run_strategy",
    "solve_full_oracle",
    "solve_restricted",
    "violating_set",
    "write_instance",
    "zeta_gamma",
]
