"""Exception hierarchy shared by all solver layers."""


class SolverError(Exception):
    """Base class for every error raised by :mod:`malmip`."""


class RegistryError(SolverError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DomainError(SolverError, ValueError):
    """A point lies on or outside the open box ``x_lower < x < x_upper``."""


class FunnelError(DomainError):
    """Constraint values left the funnel ``|c_i(x)| < epsilon``."""


class ConditioningError(SolverError):
    """Inertia correction needed a shift beyond the admissible cap."""


class LineSearchError(SolverError):
    """Backtracking on the merit function ran out of trial step sizes."""

    def __init__(self, message, slope=None, trace=None):
        super().__init__(message)
        self.slope = slope
        self.trace = trace


class NonConvergenceError(SolverError):
    """An iteration cap was hit before the loop condition was met."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class AuxiliarySolveError(SolverError):
    """The Newton iteration on the auxiliary multiplier-update system stalled."""


class OuterStallError(SolverError):
    """No relaxation factor down to the underflow threshold was accepted."""

    def __init__(self, message, trials=None):
        super().__init__(message)
        self.trials = trials
