"""Problem description, solver constants and the primal-dual state containers.

The problem being minimized is the penalty-barrier function

    phi(x) = f(x) + rho/2 x'Sx + 1/(2 omega) ||c(x)||^2
             - tau_E * sum(log(x - x_lower) + log(x_upper - x))

over the open box ``x_lower < x < x_upper``.  Constraint Jacobians are stored
``n x m`` (one column per constraint gradient).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
import scipy.linalg

from .errors import DomainError, FunnelError

__all__ = [
    "ProblemSpec",
    "SolverConstants",
    "Iterate",
    "Params",
    "validate_initial_point",
]


@dataclass
class ProblemSpec:
    """User-supplied smooth problem data.

    ``eval_hess_lagrangian(x, y)`` must return ``hess f(x) - sum_i y_i hess c_i(x)``.
    """

    n: int
    m: int
    eval_f: Callable[[np.ndarray], float]
    eval_grad_f: Callable[[np.ndarray], np.ndarray]
    eval_c: Callable[[np.ndarray], np.ndarray]
    eval_jac_c: Callable[[np.ndarray], np.ndarray]
    eval_hess_lagrangian: Callable[[np.ndarray, np.ndarray], np.ndarray]
    x_lower: np.ndarray
    x_upper: np.ndarray
    S: Optional[np.ndarray] = None
    is_linear: bool = False
    name: str = "anonymous"
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        self.x_lower = np.asarray(self.x_lower, dtype=float).reshape(self.n)
        self.x_upper = np.asarray(self.x_upper, dtype=float).reshape(self.n)
        if not np.all(self.x_lower < self.x_upper):
            raise ValueError("bounds must satisfy x_lower < x_upper componentwise")
        if self.S is None:
            self.S = np.eye(self.n)
        self.S = np.asarray(self.S, dtype=float)
        if self.S.shape != (self.n, self.n):
            raise ValueError(f"S must be {self.n}x{self.n}, got {self.S.shape}")
        if not np.allclose(self.S, self.S.T, rtol=0.0, atol=1e-14 * np.abs(self.S).max()):
            raise ValueError("S must be symmetric")
        try:
            scipy.linalg.cholesky(self.S, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ValueError("S must be positive definite") from exc
        if self.x0 is not None:
            self.x0 = np.asarray(self.x0, dtype=float).reshape(self.n)

    def interior(self, x) -> bool:
        return bool(np.all(x > self.x_lower) and np.all(x < self.x_upper))


@dataclass(frozen=True)
class SolverConstants:
    """Fixed scalars of the method.

    Defaults that the method description leaves open (``omega_tilde``,
    ``tau_tilde``, ``nu``, ``chi``, ``theta``, the Armijo constants and
    ``tau_init``) are choices of this package.
    """

    rho: float = 1e-8
    omega: float = 1e-8
    omega_tilde: float = 1e-4  # not fixed by the method
    tau_end: float = 1e-8
    tau_tilde: float = 1e-6  # not fixed by the method
    epsilon: float = 0.1
    nu: float = 1.0  # not fixed by the method
    theta: float = 0.995  # not fixed by the method
    tol: float = 1e-8
    chi: float = 100.0  # not fixed by the method
    sigma: float = 0.1
    armijo_c: float = 1e-4  # not fixed by the method
    backtrack: float = 0.5  # not fixed by the method
    rho_tilde_growth: float = 10.0
    rho_tilde_max: float = 1e40
    tau_init: float = 0.1  # not fixed by the method
    alpha_min: float = 1e-8
    max_inner: int = 200
    max_outer: int = 5000
    max_outermost: int = 5000
    max_backtracks: int = 60
    max_aux: int = 100
    max_refine: int = 6

    def __post_init__(self):
        if not 0.0 < self.omega < self.omega_tilde:
            raise ValueError("need 0 < omega < omega_tilde")
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("need 0 < sigma < 1")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("need 0 < theta < 1")
        if not self.tau_end > 0.0:
            raise ValueError("need tau_end > 0")
        if not self.chi >= 1.0:
            raise ValueError("need chi >= 1")
        if self.rho <= 0.0 or self.epsilon <= 0.0 or self.nu <= 0.0 or self.tol <= 0.0:
            raise ValueError("rho, epsilon, nu and tol must be positive")
        if self.tau_tilde < 0.0:
            raise ValueError("tau_tilde must be nonnegative")
        if not 0.0 < self.backtrack < 1.0 or not 0.0 < self.armijo_c < 1.0:
            raise ValueError("armijo_c and backtrack must lie in (0, 1)")
        if self.rho_tilde_growth <= 1.0:
            raise ValueError("rho_tilde_growth must exceed 1")

    @property
    def funnel_on(self) -> bool:
        return self.tau_tilde > 0.0

    def replace(self, **changes) -> "SolverConstants":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_strings(cls, pairs: Mapping[str, str], base: Optional["SolverConstants"] = None):
        """Build constants from ``key -> text`` overrides, coercing to field types."""
        base = cls() if base is None else base
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        changes = {}
        for key, text in pairs.items():
            if key not in types:
                raise KeyError(f"unknown solver constant {key!r}; known: {', '.join(sorted(types))}")
            if types[key] in (int, "int"):
                changes[key] = int(float(text))
            else:
                changes[key] = float(text)
        return dataclasses.replace(base, **changes)


@dataclass
class Iterate:
    """Primal-dual point ``z = (x, lambda, mu_L, mu_R)``."""

    x: np.ndarray
    lam: np.ndarray
    mu_L: np.ndarray
    mu_R: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.lam, self.mu_L, self.mu_R])

    @classmethod
    def from_vector(cls, v, n: int, m: int) -> "Iterate":
        v = np.asarray(v, dtype=float)
        return cls(v[:n].copy(), v[n:n + m].copy(), v[n + m:2 * n + m].copy(), v[2 * n + m:].copy())

    def moved(self, dz: np.ndarray, alpha: float) -> "Iterate":
        n, m = self.x.size, self.lam.size
        return Iterate.from_vector(self.as_vector() + alpha * dz, n, m)

    def copy(self) -> "Iterate":
        return Iterate(self.x.copy(), self.lam.copy(), self.mu_L.copy(), self.mu_R.copy())

    def in_F(self, prob: ProblemSpec) -> bool:
        return prob.interior(self.x) and bool(np.all(self.mu_L > 0) and np.all(self.mu_R > 0))


@dataclass
class Params:
    """Parameters ``p = (tau, lambda_hat)`` that only change in outer loops."""

    tau: float
    lam_hat: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def copy(self) -> "Params":
        return Params(float(self.tau), self.lam_hat.copy())


def validate_initial_point(prob: ProblemSpec, consts: SolverConstants, x0) -> np.ndarray:
    """Check that ``x0`` is strictly inside the box and, with the funnel on, strictly inside the funnel."""
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != prob.n:
        raise DomainError(f"initial point has {x0.size} entries, problem {prob.name!r} has n = {prob.n}")
    if not prob.interior(x0):
        raise DomainError("initial point must lie strictly inside (x_lower, x_upper)")
    c0 = np.asarray(prob.eval_c(x0), dtype=float)
    cmax = float(np.max(np.abs(c0)))
    if consts.funnel_on and not cmax < consts.epsilon:
        raise FunnelError(
            f"||c(x0)||_inf = {cmax:.6g} is not below the funnel width epsilon = "
            f"{consts.epsilon:.6g}; choose a better x0 or a larger epsilon"
        )
    return x0
