"""Modified augmented Lagrangian (MALM) outer iteration.

Each outer step moves a fraction ``alpha`` of the regularized multiplier into
``lam_hat`` and recomputes the primal-dual point from an auxiliary system built
on the linear model of f and c at the incumbent ``x``:

    rho S x_t + grad f(x) - J (lam_hat_t + w(c_lin(x_t))) - J lam_t - mu_L_t + mu_R_t = 0
    c_lin(x_t) + omega lam_hat_t + (omega + omega_tilde) lam_t                       = 0
    mu_L_t (x_t - x_lower) = tau,   mu_R_t (x_upper - x_t) = tau

with ``c_lin(y) = c(x) + J'(y - x)``.  These are the barrier optimality conditions
of a strictly convex problem, i.e. F = 0 for the linearized problem, so they are
solved with the inner machinery applied to that model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .errors import (
    AuxiliarySolveError,
    ConditioningError,
    DomainError,
    LineSearchError,
    NonConvergenceError,
    OuterStallError,
)
from .inner import InnerTrace, inner_solve, newton_polish
from .problem import Iterate, Params, ProblemSpec, SolverConstants
from .residuals import eval_F

__all__ = ["Counters", "linearize", "solve_auxiliary", "malm_step", "outer_solve"]


@dataclass
class Counters:
    outermost: int = 0
    outer: int = 0
    inner_steps: int = 0
    aux_solves: int = 0
    aux_steps: int = 0
    polish_steps: int = 0
    factorizations: int = 0
    inertia_shifts: int = 0
    inner_traces: List[InnerTrace] = field(default_factory=list)
    aux_traces: List[InnerTrace] = field(default_factory=list)

    def add_inner(self, trace: InnerTrace):
        self.inner_steps += trace.steps
        self.factorizations += trace.factorizations
        self.inertia_shifts += trace.inertia_shifts
        self.inner_traces.append(trace)

    def add_aux(self, trace: InnerTrace):
        self.aux_solves += 1
        self.aux_steps += trace.steps
        self.aux_traces.append(trace)
        self.factorizations += trace.factorizations
        self.inertia_shifts += trace.inertia_shifts


def linearize(prob: ProblemSpec, x) -> ProblemSpec:
    """Affine model of ``prob`` at ``x`` (zero Lagrangian Hessian)."""
    x = np.array(x, dtype=float)
    f0 = float(prob.eval_f(x))
    g0 = np.asarray(prob.eval_grad_f(x), dtype=float).copy()
    c0 = np.asarray(prob.eval_c(x), dtype=float).copy()
    J = np.asarray(prob.eval_jac_c(x), dtype=float).copy()
    zero = np.zeros((prob.n, prob.n))
    return ProblemSpec(
        n=prob.n,
        m=prob.m,
        eval_f=lambda y: f0 + g0 @ (y - x),
        eval_grad_f=lambda y: g0,
        eval_c=lambda y: c0 + J.T @ (y - x),
        eval_jac_c=lambda y: J,
        eval_hess_lagrangian=lambda y, lam: zero,
        x_lower=prob.x_lower,
        x_upper=prob.x_upper,
        S=prob.S,
        is_linear=True,
        name=f"{prob.name}/linearized",
    )


def solve_auxiliary(z: Iterate, p_alpha: Params, prob: ProblemSpec, consts: SolverConstants,
                    lam_init=None, model: Optional[ProblemSpec] = None):
    """Solve the auxiliary system for ``p_alpha``, warm-started at ``z``.

    Returns ``(z_trial, trace)``.  ``lam_init`` replaces ``z.lam`` as the
    starting multiplier (the outer step passes ``(1 - alpha) * lam``).
    """
    if model is None:
        model = linearize(prob, z.x)
    start = z.copy()
    if lam_init is not None:
        start.lam = np.array(lam_init, dtype=float)
    try:
        z_trial, trace = inner_solve(
            start, p_alpha, model, consts,
            tol=0.1 * consts.tol, max_iter=consts.max_aux,
            funnel_curvature=True, level="aux",
        )
    except (NonConvergenceError, LineSearchError, ConditioningError, DomainError) as exc:
        raise AuxiliarySolveError(f"auxiliary Newton solve failed: {exc}") from exc
    return z_trial, trace


def malm_step(z: Iterate, p: Params, prob: ProblemSpec, consts: SolverConstants,
              emit: Optional[Callable[[dict], None]] = None, counters: Optional[Counters] = None,
              alpha_first: float = 1.0):
    """Relaxed multiplier update with halving on alpha.

    Returns ``(z_trial, p_alpha, alpha)`` for the first alpha in ``1, 1/2, 1/4, ...``
    with ``||F(z_trial, p_alpha)||_inf <= chi * tol``.
    """
    model = linearize(prob, z.x)
    accept_tol = consts.chi * consts.tol
    trials = []
    alpha = alpha_first
    while alpha >= consts.alpha_min:
        p_alpha = Params(p.tau, p.lam_hat + alpha * z.lam)
        record = {"event": "malm_trial", "level": "outer", "alpha": alpha, "tau": p.tau}
        try:
            z_trial, aux_trace = solve_auxiliary(z, p_alpha, prob, consts,
                                                 lam_init=(1.0 - alpha) * z.lam, model=model)
        except AuxiliarySolveError as exc:
            record.update(status="aux-failed", message=str(exc))
            z_trial = None
        else:
            if counters is not None:
                counters.add_aux(aux_trace)
            record["aux_steps"] = aux_trace.steps
            c_norm = float(np.max(np.abs(prob.eval_c(z_trial.x))))
            record["c_norm"] = c_norm
            if consts.funnel_on and c_norm >= consts.epsilon:
                record.update(status="outside-funnel")
            else:
                F_norm = eval_F(z_trial, p_alpha, prob, consts).norm_inf()
                record["F_norm"] = F_norm
                record["status"] = "accepted" if F_norm <= accept_tol else "rejected"
        trials.append(record)
        if emit is not None:
            emit(dict(record))
        if record.get("status") == "accepted":
            return z_trial, p_alpha, alpha
        alpha *= 0.5
    raise OuterStallError(
        f"no multiplier relaxation alpha >= {consts.alpha_min:.1e} gave ||F|| <= {accept_tol:.3g} "
        f"(||lambda||_inf = {np.max(np.abs(z.lam)):.3e})",
        trials=trials,
    )


def outer_solve(z: Iterate, p: Params, prob: ProblemSpec, consts: SolverConstants,
                emit: Optional[Callable[[dict], None]] = None, counters: Optional[Counters] = None,
                lead_with_malm: bool = False):
    """Alternate inner solves and MALM steps until ``||lambda||_inf <= tol``.

    With ``lead_with_malm`` one MALM step is taken before the first inner
    solve; for affine problems the auxiliary solve then recenters the iterate
    for a freshly reduced tau on its own.
    """
    counters = Counters() if counters is None else counters
    outer_here = 0

    def run_inner(z):
        z, trace = inner_solve(z, p, prob, consts, emit=emit)
        counters.add_inner(trace)
        if emit is not None:
            emit({"event": "inner_done", "level": "inner", "tau": p.tau, "steps": trace.steps,
                  "F_norm": trace.residuals[-1], "lam_norm": float(np.max(np.abs(z.lam)))})
        return z

    def run_malm(z, p):
        nonlocal outer_here
        if outer_here >= consts.max_outer:
            raise NonConvergenceError(
                f"outer iteration exceeded {consts.max_outer} multiplier updates "
                f"(||lambda||_inf = {np.max(np.abs(z.lam)):.3e})"
            )
        z, p, alpha = malm_step(z, p, prob, consts, emit=emit, counters=counters)
        outer_here += 1
        counters.outer += 1
        if emit is not None:
            emit({"event": "malm_accept", "level": "outer", "alpha": alpha, "tau": p.tau,
                  "lam_norm": float(np.max(np.abs(z.lam))),
                  "c_norm": float(np.max(np.abs(prob.eval_c(z.x)))),
                  "F_norm": eval_F(z, p, prob, consts).norm_inf()})
        return z, p

    if lead_with_malm:
        z, p = run_malm(z, p)
    z = run_inner(z)
    while float(np.max(np.abs(z.lam))) > consts.tol:
        if not prob.is_linear:
            # The auxiliary model drops the curvature of f and c, so any residual
            # left by the inner solve is amplified along weakly curved directions.
            z = newton_polish(z, p, prob, consts, emit, counters, max_steps=3)
        z, p = run_malm(z, p)
        z = run_inner(z)
    return z, p
