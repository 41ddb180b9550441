"""Newton step from the symmetric saddle-point system with inertia correction.

The (3n+m) saddle matrix has 2n+m negative definite trailing blocks; eliminating
them leaves the n x n Schur complement

    K(rho_t) = H + rho_t S + diag(mu_L/d_L) + diag(mu_R/d_R) + J J' / (omega + omega_tilde)

and the saddle matrix has inertia (n, 2n+m, 0) exactly when K is positive
definite, so inertia is tested by attempting a Cholesky factorization of K.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConditioningError, DomainError
from .problem import Iterate, ProblemSpec
from .residuals import JacobianParts, ResidualBlocks

__all__ = ["StepResult", "Condensed", "condense", "solve_step", "max_step_to_boundary"]


@dataclass
class StepResult:
    dz: np.ndarray
    rho_tilde_used: float
    inertia_shifts: int
    factorizations: int
    newton_residual: float


@dataclass
class Condensed:
    K: np.ndarray
    sigma_L: np.ndarray
    sigma_R: np.ndarray
    inv_pen: float  # 1 / (omega + omega_tilde)


def condense(parts: JacobianParts, rho_tilde: float) -> Condensed:
    if np.any(parts.d_L <= 0) or np.any(parts.d_R <= 0) or np.any(parts.mu_L <= 0) or np.any(parts.mu_R <= 0):
        raise DomainError("saddle system requires a strictly interior iterate")
    pen = parts.omega + parts.omega_tilde
    if not pen > 0:
        raise DomainError("omega + omega_tilde must be positive")
    J = parts.jac_c
    sigma_L = parts.mu_L / parts.d_L
    sigma_R = parts.mu_R / parts.d_R
    K = parts.H + rho_tilde * parts.S + (J @ J.T) / pen
    K[np.diag_indices_from(K)] += sigma_L + sigma_R
    return Condensed(K, sigma_L, sigma_R, 1.0 / pen)


def _back_substitute(parts: JacobianParts, F: ResidualBlocks, cond: Condensed, factor) -> np.ndarray:
    J = parts.jac_c
    rhs = -F.r_dual - cond.inv_pen * (J @ F.r_primal) - F.r_comp_L / parts.d_L + F.r_comp_R / parts.d_R
    dx = scipy.linalg.cho_solve(factor, rhs)
    dlam = -cond.inv_pen * (J.T @ dx + F.r_primal)
    dmu_L = -(parts.mu_L * dx + F.r_comp_L) / parts.d_L
    dmu_R = (parts.mu_R * dx - F.r_comp_R) / parts.d_R
    return np.concatenate([dx, dlam, dmu_L, dmu_R])


def solve_step(F: ResidualBlocks, parts: JacobianParts, consts=None, warm_rho_tilde=None) -> StepResult:
    """Solve ``DF_shifted dz = -F``, growing rho_tilde until K is positive definite.

    The first attempt always uses rho_tilde = rho.  After a failure the shift
    restarts from the larger of ``growth * rho``, ``1e-8 * ||H||_inf`` and half of
    ``warm_rho_tilde`` (the previous successful shift), then grows geometrically.
    """
    growth = 10.0 if consts is None else consts.rho_tilde_growth
    rho_tilde_max = 1e40 if consts is None else consts.rho_tilde_max
    rho = parts.rho
    rho_t = rho
    shifts = 0
    factorizations = 0
    while True:
        cond = condense(parts, rho_t)
        factorizations += 1
        try:
            factor = scipy.linalg.cho_factor(cond.K, lower=True, check_finite=False)
            if not np.all(np.isfinite(factor[0])):
                raise np.linalg.LinAlgError("non-finite factor")
            break
        except np.linalg.LinAlgError:
            pass
        if shifts == 0:
            start = max(rho * growth, 1e-8 * np.abs(parts.H).sum(axis=1).max(initial=0.0), 1e-20)
            if warm_rho_tilde is not None:
                start = max(start, 0.5 * warm_rho_tilde)
            rho_t = start
        else:
            rho_t *= growth
        shifts += 1
        if rho_t > rho_tilde_max:
            raise ConditioningError(f"inertia correction exceeded rho_tilde cap {rho_tilde_max:.3g}")
    dz = _back_substitute(parts, F, cond, factor)
    D = parts.dense(rho_tilde=rho_t)
    newton_residual = float(np.max(np.abs(D @ dz + F.vector())))
    return StepResult(dz, rho_t, shifts, factorizations, newton_residual)


def max_step_to_boundary(z: Iterate, dz, prob: ProblemSpec) -> float:
    """Largest alpha keeping box and bound multipliers in the closure; ``inf`` if unlimited."""
    n, m = z.x.size, z.lam.size
    dz = np.asarray(dz, dtype=float)
    dx = dz[:n]
    dmu_L = dz[n + m:2 * n + m]
    dmu_R = dz[2 * n + m:]
    alpha = np.inf
    for dist, direction in (
        (z.x - prob.x_lower, -dx),
        (prob.x_upper - z.x, dx),
        (z.mu_L, -dmu_L),
        (z.mu_R, -dmu_R),
    ):
        hit = direction > 0
        if np.any(hit):
            alpha = min(alpha, float(np.min(dist[hit] / direction[hit])))
    return alpha
