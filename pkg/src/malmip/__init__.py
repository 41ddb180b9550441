"""Penalty-barrier NLP solver: interior-point path following with modified augmented Lagrangian updates."""
from .derivcheck import check_derivatives
from .driver import SolveReport, initialize, solve, update_tau
from .errors import (
    AuxiliarySolveError,
    ConditioningError,
    DomainError,
    FunnelError,
    LineSearchError,
    NonConvergenceError,
    OuterStallError,
    RegistryError,
    SolverError,
)
from .inner import inner_solve
from .merit import directional_derivative, eval_grad_M, eval_M
from .outer import malm_step, outer_solve, solve_auxiliary
from .problem import Iterate, Params, ProblemSpec, SolverConstants, validate_initial_point
from .problems import list_problems, make_problem
from .residuals import eval_DF, eval_F, eval_grad_phi_funneled, eval_phi, eval_w
from .saddle import condense, max_step_to_boundary, solve_step

__version__ = "0.1.0"
