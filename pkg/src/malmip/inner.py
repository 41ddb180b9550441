"""Globalized quasi-Newton iteration on F(., p) for fixed parameters p."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .errors import ConditioningError, LineSearchError, NonConvergenceError
from .merit import eval_M, eval_grad_M
from .problem import Iterate, Params, ProblemSpec, SolverConstants
from .residuals import eval_DF, eval_F
from .saddle import max_step_to_boundary, solve_step

__all__ = ["InnerRecord", "InnerTrace", "inner_solve", "newton_polish"]


@dataclass
class InnerRecord:
    iter: int
    F_norm: float
    M: float
    slope: float
    alpha0: float
    alpha: float
    alpha_box: float
    rho_tilde: float
    inertia_shifts: int
    factorizations: int
    backtracks: int
    rule: str  # "armijo" or "residual"
    M_new: float
    F_norm_new: float
    c_norm_new: float
    newton_residual: float


@dataclass
class InnerTrace:
    records: List[InnerRecord] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.records)

    @property
    def factorizations(self) -> int:
        return sum(r.factorizations for r in self.records)

    @property
    def inertia_shifts(self) -> int:
        return sum(r.inertia_shifts for r in self.records)


def _c_norm(prob, x):
    return float(np.max(np.abs(prob.eval_c(x))))


def inner_solve(
    z: Iterate,
    p: Params,
    prob: ProblemSpec,
    consts: SolverConstants,
    emit: Optional[Callable[[dict], None]] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    funnel_curvature: bool = False,
    level: str = "inner",
):
    """Drive ``||F(z, p)||_inf`` below ``tol`` with merit backtracking.

    Steps start at ``min(1, theta * alpha_box)`` and are halved until the Armijo
    condition on M holds.  When even the first trial's predicted decrease is
    below the rounding noise of M, a trial is accepted once it lowers
    ``||F||_inf`` instead.
    """
    tol = consts.tol if tol is None else tol
    max_iter = consts.max_inner if max_iter is None else max_iter
    trace = InnerTrace()
    z = z.copy()
    warm = None
    F = eval_F(z, p, prob, consts)
    F_norm = F.norm_inf()
    trace.residuals.append(F_norm)
    it = 0
    while F_norm > tol:
        if it >= max_iter:
            raise NonConvergenceError(
                f"{level} iteration did not reach ||F|| <= {tol:.3g} in {max_iter} steps "
                f"(last ||F|| = {F_norm:.3e})",
                trace=trace,
            )
        parts = eval_DF(z, p, prob, consts, funnel_curvature=funnel_curvature)
        step = solve_step(F, parts, consts, warm_rho_tilde=warm)
        if step.inertia_shifts:
            warm = step.rho_tilde_used
        dz = step.dz
        slope = float(eval_grad_M(z, p, prob, consts, F=F) @ dz)
        M0 = eval_M(z, p, prob, consts)
        alpha_box = max_step_to_boundary(z, dz, prob)
        alpha0 = min(1.0, consts.theta * alpha_box)
        noisy = abs(alpha0 * slope) <= M0.noise
        if slope >= 0.0 and not noisy:
            raise LineSearchError(
                f"step is not a descent direction for M (slope {slope:.3e})", slope=slope, trace=trace
            )

        alpha = alpha0
        accepted = None
        for bt in range(consts.max_backtracks + 1):
            z_try = z.moved(dz, alpha)
            M_try = eval_M(z_try, p, prob, consts)
            if M_try.domain_ok:
                if M_try.value <= M0.value + consts.armijo_c * alpha * slope:
                    accepted = ("armijo", bt)
                elif noisy:
                    F_try = eval_F(z_try, p, prob, consts)
                    if F_try.norm_inf() < F_norm:
                        accepted = ("residual", bt)
                if accepted:
                    break
            alpha *= consts.backtrack
        if accepted is None:
            raise LineSearchError(
                f"no acceptable step after {consts.max_backtracks} backtracks "
                f"(slope {slope:.3e}, ||F|| = {F_norm:.3e})",
                slope=slope,
                trace=trace,
            )

        z = z_try
        F = eval_F(z, p, prob, consts)
        F_norm_new = F.norm_inf()
        rec = InnerRecord(
            iter=it,
            F_norm=F_norm,
            M=M0.value,
            slope=slope,
            alpha0=alpha0,
            alpha=alpha,
            alpha_box=alpha_box,
            rho_tilde=step.rho_tilde_used,
            inertia_shifts=step.inertia_shifts,
            factorizations=step.factorizations,
            backtracks=accepted[1],
            rule=accepted[0],
            M_new=M_try.value,
            F_norm_new=F_norm_new,
            c_norm_new=_c_norm(prob, z.x),
            newton_residual=step.newton_residual,
        )
        trace.records.append(rec)
        trace.residuals.append(F_norm_new)
        if emit is not None:
            emit({"event": "inner_step", "level": level, "tau": p.tau,
                  "lam_norm": float(np.max(np.abs(z.lam))), **rec.__dict__})
        F_norm = F_norm_new
        it += 1
    return z, trace


def newton_polish(z, p, prob, consts, emit=None, counters=None, max_steps=10):
    """Undamped Newton steps (fraction-to-boundary only) while ||F||_inf keeps dropping."""
    F = eval_F(z, p, prob, consts)
    F_norm = F.norm_inf()
    for _ in range(max_steps):
        if F_norm == 0.0:
            break
        parts = eval_DF(z, p, prob, consts)
        try:
            step = solve_step(F, parts, consts)
        except ConditioningError:
            break
        if counters is not None:
            counters.factorizations += step.factorizations
            counters.inertia_shifts += step.inertia_shifts
        alpha = min(1.0, consts.theta * max_step_to_boundary(z, step.dz, prob))
        z_new = z.moved(step.dz, alpha)
        if not eval_M(z_new, p, prob, consts).domain_ok:
            break
        F_new = eval_F(z_new, p, prob, consts)
        if not F_new.norm_inf() < F_norm:
            break
        z, F, F_norm = z_new, F_new, F_new.norm_inf()
        if counters is not None:
            counters.polish_steps += 1
        if emit is not None:
            emit({"event": "polish_step", "level": "inner", "tau": p.tau, "alpha": alpha,
                  "F_norm": F_norm, "lam_norm": float(np.max(np.abs(z.lam))),
                  "c_norm": float(np.max(np.abs(prob.eval_c(z.x))))})
    return z
