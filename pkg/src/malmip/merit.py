"""Primal-dual merit function M(z, p) used to globalize the inner Newton iteration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .problem import Iterate, Params, ProblemSpec, SolverConstants
from .residuals import eval_F

__all__ = ["MeritValue", "eval_M", "eval_grad_M", "directional_derivative"]


@dataclass
class MeritValue:
    value: float
    domain_ok: bool
    # sum of absolute values of the summed terms, a scale for rounding noise
    magnitude: float = np.inf

    @property
    def noise(self) -> float:
        return 64.0 * np.finfo(float).eps * self.magnitude


_OUTSIDE = MeritValue(np.inf, False, np.inf)


def eval_M(z: Iterate, p: Params, prob: ProblemSpec, consts: SolverConstants) -> MeritValue:
    x = z.x
    d_L = x - prob.x_lower
    d_R = prob.x_upper - x
    if np.any(d_L <= 0) or np.any(d_R <= 0) or np.any(z.mu_L <= 0) or np.any(z.mu_R <= 0):
        return _OUTSIDE
    c_val = np.asarray(prob.eval_c(x), dtype=float)
    eps = consts.epsilon
    if consts.funnel_on and np.any(np.abs(c_val) >= eps):
        return _OUTSIDE

    om, omt, tau, nu = consts.omega, consts.omega_tilde, p.tau, consts.nu
    lagrangian = prob.eval_f(x) - p.lam_hat @ c_val
    funnel = 0.0
    if consts.funnel_on:
        funnel = -consts.tau_tilde * np.sum(np.log(eps + c_val) + np.log(eps - c_val))
    shifted = c_val + om * (p.lam_hat + z.lam)
    alm = 0.5 / omt * (shifted @ shifted)
    regular = 0.5 * consts.rho * x @ (prob.S @ x) + 0.5 * om * (z.lam @ z.lam)
    barrier = -tau * np.sum(np.log(d_L) + np.log(d_R))
    r_primal = c_val + om * p.lam_hat + (om + omt) * z.lam
    primal_dual = 0.5 * nu / omt * (r_primal @ r_primal)
    u_L = z.mu_L * d_L / tau
    u_R = z.mu_R * d_R / tau
    proximity = -nu * tau * (np.sum(np.log(u_L) + 1.0 - u_L) + np.sum(np.log(u_R) + 1.0 - u_R))

    terms = (lagrangian, funnel, alm, regular, barrier, primal_dual, proximity)
    value = float(sum(terms))
    if not np.isfinite(value):
        return _OUTSIDE
    magnitude = (
        abs(prob.eval_f(x)) + float(np.sum(np.abs(p.lam_hat * c_val))) + abs(funnel) + alm
        + regular + tau * float(np.sum(np.abs(np.log(d_L)) + np.abs(np.log(d_R))))
        + primal_dual + nu * tau * float(np.sum(u_L + u_R + np.abs(np.log(u_L)) + np.abs(np.log(u_R))))
    )
    return MeritValue(value, True, magnitude)


def eval_grad_M(z: Iterate, p: Params, prob: ProblemSpec, consts: SolverConstants,
                F=None) -> np.ndarray:
    """Analytic gradient of M with respect to ``(x, lambda, mu_L, mu_R)``.

    Every group of M differentiates into residual blocks of F:

        d/dx   = r_dual + (1 + nu) * (r_L / d_L - r_R / d_R + J r_primal / omega_tilde)
        d/dlam = (omega + nu (omega + omega_tilde)) / omega_tilde * r_primal
        d/dmu  = nu * r_comp / mu
    """
    if not z.in_F(prob):
        raise DomainError("merit gradient requested outside the interior")
    if F is None:
        F = eval_F(z, p, prob, consts)
    J = np.asarray(prob.eval_jac_c(z.x), dtype=float)
    om, omt, nu = consts.omega, consts.omega_tilde, consts.nu
    d_L = z.x - prob.x_lower
    d_R = prob.x_upper - z.x
    g_x = F.r_dual + (1.0 + nu) * (F.r_comp_L / d_L - F.r_comp_R / d_R + J @ F.r_primal / omt)
    g_lam = (om + nu * (om + omt)) / omt * F.r_primal
    g_mu_L = nu * F.r_comp_L / z.mu_L
    g_mu_R = nu * F.r_comp_R / z.mu_R
    return np.concatenate([g_x, g_lam, g_mu_L, g_mu_R])


def directional_derivative(z: Iterate, p: Params, dz, prob: ProblemSpec,
                           consts: SolverConstants, F=None) -> float:
    return float(eval_grad_M(z, p, prob, consts, F=F) @ np.asarray(dz, dtype=float))
