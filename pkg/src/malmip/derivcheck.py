"""Finite-difference verification of every analytic derivative in the package.

Relative errors are ``||analytic - fd||_inf / max(||fd||_inf, 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .merit import eval_M, eval_grad_M
from .problem import Iterate, Params, ProblemSpec, SolverConstants
from .residuals import eval_DF, eval_F, eval_funnel_barrier, eval_grad_phi_funneled, eval_phi

__all__ = [
    "fd_gradient",
    "fd_jacobian",
    "relative_error",
    "sample_x",
    "sample_state",
    "SuiteResult",
    "DerivativeReport",
    "check_derivatives",
    "SUITE_TOLERANCES",
]

SUITE_TOLERANCES = {
    "grad_f": 1e-6,
    "jac_c": 1e-6,
    "hess_lagrangian": 1e-5,
    "grad_M": 1e-5,
    "grad_phi_funnel": 1e-6,
    "DF": 1e-5,
}

_H = np.finfo(float).eps ** (1.0 / 3.0)


def _steps(x, h):
    if h is None:
        return _H * np.maximum(1.0, np.abs(x))
    return np.broadcast_to(np.asarray(h, dtype=float), x.shape)


def fd_gradient(fun: Callable[[np.ndarray], float], x, h=None) -> np.ndarray:
    """Central differences of a scalar function; ``h`` may be a scalar or per-coordinate array."""
    x = np.array(x, dtype=float)
    steps = _steps(x, h)
    g = np.empty_like(x)
    xx = x.copy()
    for i in range(x.size):
        xx[i] = x[i] + steps[i]
        fp = fun(xx)
        xx[i] = x[i] - steps[i]
        fm = fun(xx)
        xx[i] = x[i]
        g[i] = (fp - fm) / (2.0 * steps[i])
    return g


def fd_jacobian(fun: Callable[[np.ndarray], np.ndarray], x, h=None) -> np.ndarray:
    """Central differences of a vector function; row i is d fun_i / dx."""
    x = np.array(x, dtype=float)
    steps = _steps(x, h)
    cols = []
    xx = x.copy()
    for i in range(x.size):
        xx[i] = x[i] + steps[i]
        fp = np.atleast_1d(np.asarray(fun(xx), dtype=float)).copy()
        xx[i] = x[i] - steps[i]
        fm = np.atleast_1d(np.asarray(fun(xx), dtype=float)).copy()
        xx[i] = x[i]
        cols.append((fp - fm) / (2.0 * steps[i]))
    return np.column_stack(cols)


def relative_error(analytic, reference) -> float:
    a = np.asarray(analytic, dtype=float)
    b = np.asarray(reference, dtype=float)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1.0))


def sample_x(prob: ProblemSpec, consts: SolverConstants, rng: np.random.Generator,
             spread: float = 0.2, margin: float = 0.05) -> np.ndarray:
    """Random box-interior point near ``prob.x0`` with ``||c||_inf <= epsilon / 2``.

    Points keep a distance of ``margin * width`` to the bounds so that the
    barrier terms do not dominate the difference quotients.
    """
    width = prob.x_upper - prob.x_lower
    lo = prob.x_lower + margin * width
    hi = prob.x_upper - margin * width
    center = prob.x0 if prob.x0 is not None else 0.5 * (prob.x_lower + prob.x_upper)
    limit = 0.5 * consts.epsilon
    scale = spread
    for _ in range(200):
        x = np.clip(center + scale * width * rng.uniform(-1.0, 1.0, prob.n), lo, hi)
        if np.max(np.abs(prob.eval_c(x))) <= limit:
            return x
        scale *= 0.7
    x = np.clip(center, lo, hi)
    if np.max(np.abs(prob.eval_c(x))) > limit:
        raise ValueError(f"could not sample a point with ||c|| <= {limit} for {prob.name!r}")
    return x


def sample_state(prob: ProblemSpec, consts: SolverConstants, rng: np.random.Generator):
    """Random interior ``(z, p)``: moderate multipliers, duals within a factor e of centrality."""
    x = sample_x(prob, consts, rng)
    tau = 10.0 ** rng.uniform(-3.0, -1.0)
    d_L = x - prob.x_lower
    d_R = prob.x_upper - x
    z = Iterate(
        x=x,
        lam=0.1 * rng.standard_normal(prob.m),
        mu_L=tau / d_L * np.exp(rng.uniform(-1.0, 1.0, prob.n)),
        mu_R=tau / d_R * np.exp(rng.uniform(-1.0, 1.0, prob.n)),
    )
    return z, Params(tau, rng.standard_normal(prob.m))


@dataclass
class SuiteResult:
    name: str
    max_error: float
    tolerance: float
    points: int

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)


@dataclass
class DerivativeReport:
    problem: str
    suites: Dict[str, SuiteResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites.values())

    def lines(self) -> List[str]:
        out = []
        for s in self.suites.values():
            tag = "PASS" if s.passed else "FAIL"
            out.append(f"{tag} {self.problem} {s.name}: max rel err {s.max_error:.3e} "
                       f"(tol {s.tolerance:.0e}, {s.points} points)")
        return out


def _suite_grad_f(prob, x):
    return relative_error(prob.eval_grad_f(x), fd_gradient(prob.eval_f, x))


def _suite_jac_c(prob, x):
    # eval_jac_c is n x m; the FD Jacobian of c is m x n
    return relative_error(np.asarray(prob.eval_jac_c(x)).T, fd_jacobian(prob.eval_c, x))


def _suite_hess(prob, x, y):
    def grad_lag(v):
        return prob.eval_grad_f(v) - np.asarray(prob.eval_jac_c(v)) @ y
    ref = fd_jacobian(grad_lag, x)
    return relative_error(prob.eval_hess_lagrangian(x, y), 0.5 * (ref + ref.T))


def _state_steps(z: Iterate) -> np.ndarray:
    # bound multipliers scale like tau / distance and can be tiny: step relative to them
    v = z.as_vector()
    h = _H * np.maximum(1.0, np.abs(v))
    k = z.x.size + z.lam.size
    h[k:] = _H * np.abs(v[k:])
    return h


def _suite_grad_M(prob, consts, z, p):
    n, m = prob.n, prob.m

    def M(v):
        return eval_M(Iterate.from_vector(v, n, m), p, prob, consts).value
    return relative_error(eval_grad_M(z, p, prob, consts), fd_gradient(M, z.as_vector(), _state_steps(z)))


def _suite_grad_phi(prob, consts, x):
    def phi_funnel(v):
        return eval_phi(v, prob, consts) + eval_funnel_barrier(np.asarray(prob.eval_c(v)), consts)
    return relative_error(eval_grad_phi_funneled(x, prob, consts), fd_gradient(phi_funnel, x))


def _suite_DF(prob, consts, z, p):
    n, m = prob.n, prob.m
    flat = consts.replace(tau_tilde=0.0)

    def F(v):
        return eval_F(Iterate.from_vector(v, n, m), p, prob, flat).vector()
    return relative_error(eval_DF(z, p, prob, flat).dense(), fd_jacobian(F, z.as_vector(), _state_steps(z)))


def check_derivatives(prob: ProblemSpec, consts: Optional[SolverConstants] = None,
                      n_points: int = 20, seed: int = 0) -> DerivativeReport:
    """Run all six suites at ``n_points`` random interior points of ``prob``."""
    consts = SolverConstants() if consts is None else consts
    rng = np.random.default_rng(seed)
    worst = {name: 0.0 for name in SUITE_TOLERANCES}
    for _ in range(n_points):
        z, p = sample_state(prob, consts, rng)
        x = z.x
        y = rng.standard_normal(prob.m)
        errs = {
            "grad_f": _suite_grad_f(prob, x),
            "jac_c": _suite_jac_c(prob, x),
            "hess_lagrangian": _suite_hess(prob, x, y),
            "grad_M": _suite_grad_M(prob, consts, z, p),
            "grad_phi_funnel": _suite_grad_phi(prob, consts, x),
            "DF": _suite_DF(prob, consts, z, p),
        }
        for k, v in errs.items():
            worst[k] = max(worst[k], v)
    report = DerivativeReport(prob.name)
    for k, tol in SUITE_TOLERANCES.items():
        report.suites[k] = SuiteResult(k, worst[k], tol, n_points)
    return report
