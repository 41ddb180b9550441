"""Root function F(z, p), its quasi-Newton Jacobian and the penalty-barrier objective."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FunnelError
from .problem import Iterate, Params, ProblemSpec, SolverConstants

__all__ = [
    "ResidualBlocks",
    "JacobianParts",
    "eval_w",
    "eval_w_slope",
    "eval_F",
    "eval_DF",
    "eval_phi",
    "eval_grad_phi_funneled",
    "eval_funnel_barrier",
]


@dataclass
class ResidualBlocks:
    r_dual: np.ndarray
    r_primal: np.ndarray
    r_comp_L: np.ndarray
    r_comp_R: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([self.r_dual, self.r_primal, self.r_comp_L, self.r_comp_R])

    def norm_inf(self) -> float:
        return max(
            float(np.max(np.abs(self.r_dual))),
            float(np.max(np.abs(self.r_primal))),
            float(np.max(np.abs(self.r_comp_L))),
            float(np.max(np.abs(self.r_comp_R))),
        )


@dataclass
class JacobianParts:
    """Blocks of DF(z, p).

    ``H`` is the Lagrangian Hessian at multiplier ``lam_hat + lam + w(x)``.
    """

    H: np.ndarray
    jac_c: np.ndarray
    S: np.ndarray
    d_L: np.ndarray
    d_R: np.ndarray
    mu_L: np.ndarray
    mu_R: np.ndarray
    rho: float
    omega: float
    omega_tilde: float

    def dense(self, rho_tilde=None) -> np.ndarray:
        """Assemble the full (3n+m) square Jacobian; ``rho_tilde`` replaces rho in the top-left block."""
        rho = self.rho if rho_tilde is None else rho_tilde
        n, m = self.jac_c.shape
        J = self.jac_c
        I = np.eye(n)
        D = np.zeros((3 * n + m, 3 * n + m))
        ix, il, iL, iR = slice(0, n), slice(n, n + m), slice(n + m, 2 * n + m), slice(2 * n + m, 3 * n + m)
        D[ix, ix] = self.H + rho * self.S
        D[ix, il] = -J
        D[ix, iL] = -I
        D[ix, iR] = I
        D[il, ix] = J.T
        D[il, il] = (self.omega + self.omega_tilde) * np.eye(m)
        D[iL, ix] = np.diag(self.mu_L)
        D[iL, iL] = np.diag(self.d_L)
        D[iR, ix] = -np.diag(self.mu_R)
        D[iR, iR] = np.diag(self.d_R)
        return D


def eval_w(c_val, consts: SolverConstants) -> np.ndarray:
    """Funnel multiplier shift ``tt/(eps + c) - tt/(eps - c)``, componentwise."""
    c_val = np.asarray(c_val, dtype=float)
    if not consts.funnel_on:
        return np.zeros_like(c_val)
    eps = consts.epsilon
    if np.any(np.abs(c_val) >= eps):
        raise FunnelError(f"|c| = {np.max(np.abs(c_val)):.6g} outside funnel width {eps:.6g}")
    tt = consts.tau_tilde
    return tt / (eps + c_val) - tt / (eps - c_val)


def eval_w_slope(c_val, consts: SolverConstants) -> np.ndarray:
    """Derivative of :func:`eval_w` with respect to c (always <= 0)."""
    c_val = np.asarray(c_val, dtype=float)
    if not consts.funnel_on:
        return np.zeros_like(c_val)
    eps, tt = consts.epsilon, consts.tau_tilde
    return -tt / (eps + c_val) ** 2 - tt / (eps - c_val) ** 2


def _blocks(z: Iterate, p: Params, prob: ProblemSpec, consts: SolverConstants, c_val, J, w):
    r_dual = (
        prob.eval_grad_f(z.x)
        - J @ (p.lam_hat + z.lam + w)
        + consts.rho * (prob.S @ z.x)
        - z.mu_L
        + z.mu_R
    )
    r_primal = c_val + consts.omega * p.lam_hat + (consts.omega + consts.omega_tilde) * z.lam
    r_comp_L = z.mu_L * (z.x - prob.x_lower) - p.tau
    r_comp_R = z.mu_R * (prob.x_upper - z.x) - p.tau
    return ResidualBlocks(np.asarray(r_dual, dtype=float), r_primal, r_comp_L, r_comp_R)


def eval_F(z: Iterate, p: Params, prob: ProblemSpec, consts: SolverConstants) -> ResidualBlocks:
    c_val = np.asarray(prob.eval_c(z.x), dtype=float)
    J = np.asarray(prob.eval_jac_c(z.x), dtype=float)
    w = eval_w(c_val, consts)
    return _blocks(z, p, prob, consts, c_val, J, w)


def eval_DF(z: Iterate, p: Params, prob: ProblemSpec, consts: SolverConstants,
            funnel_curvature: bool = False) -> JacobianParts:
    """Jacobian blocks of F.

    The x-derivative of ``w(x)`` is left out of the dual row unless
    ``funnel_curvature`` is set, in which case ``-J diag(w') J'`` is added to H.
    """
    c_val = np.asarray(prob.eval_c(z.x), dtype=float)
    J = np.asarray(prob.eval_jac_c(z.x), dtype=float)
    w = eval_w(c_val, consts)
    H = np.asarray(prob.eval_hess_lagrangian(z.x, p.lam_hat + z.lam + w), dtype=float)
    if funnel_curvature and consts.funnel_on:
        H = H - (J * eval_w_slope(c_val, consts)) @ J.T
    return JacobianParts(
        H=0.5 * (H + H.T),
        jac_c=J,
        S=prob.S,
        d_L=z.x - prob.x_lower,
        d_R=prob.x_upper - z.x,
        mu_L=z.mu_L.copy(),
        mu_R=z.mu_R.copy(),
        rho=consts.rho,
        omega=consts.omega,
        omega_tilde=consts.omega_tilde,
    )


def eval_phi(x, prob: ProblemSpec, consts: SolverConstants) -> float:
    """Penalty-barrier objective with two-sided barriers; ``inf`` off the open box."""
    x = np.asarray(x, dtype=float)
    if not prob.interior(x):
        return np.inf
    c_val = np.asarray(prob.eval_c(x), dtype=float)
    barrier = np.sum(np.log(x - prob.x_lower) + np.log(prob.x_upper - x))
    return float(
        prob.eval_f(x)
        + 0.5 * consts.rho * x @ (prob.S @ x)
        + 0.5 / consts.omega * (c_val @ c_val)
        - consts.tau_end * barrier
    )


def eval_funnel_barrier(c_val, consts: SolverConstants) -> float:
    """``-tau_tilde * sum(log(eps + c) + log(eps - c))``; ``inf`` outside the funnel."""
    if not consts.funnel_on:
        return 0.0
    eps = consts.epsilon
    if np.any(np.abs(c_val) >= eps):
        return np.inf
    return float(-consts.tau_tilde * np.sum(np.log(eps + c_val) + np.log(eps - c_val)))


def eval_grad_phi_funneled(x, prob: ProblemSpec, consts: SolverConstants) -> np.ndarray:
    """Gradient of phi plus the funnel barrier; stationarity certificate of the solver."""
    x = np.asarray(x, dtype=float)
    if not prob.interior(x):
        raise DomainError("gradient requested outside the open box")
    c_val = np.asarray(prob.eval_c(x), dtype=float)
    J = np.asarray(prob.eval_jac_c(x), dtype=float)
    w = eval_w(c_val, consts)
    return (
        prob.eval_grad_f(x)
        + consts.rho * (prob.S @ x)
        + J @ (c_val / consts.omega - w)
        - consts.tau_end / (x - prob.x_lower)
        + consts.tau_end / (prob.x_upper - x)
    )
