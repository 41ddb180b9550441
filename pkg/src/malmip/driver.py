"""Outermost barrier loop, initialization and the solve report."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Any, Dict, List, Optional

import numpy as np

from .errors import (
    AuxiliarySolveError,
    ConditioningError,
    LineSearchError,
    NonConvergenceError,
    OuterStallError,
)
from .inner import newton_polish
from .outer import Counters, malm_step, outer_solve
from .problem import Iterate, Params, ProblemSpec, SolverConstants, validate_initial_point
from .residuals import eval_F, eval_grad_phi_funneled, eval_phi

__all__ = ["SolveReport", "TraceSink", "update_tau", "lp_sigma", "initialize", "solve",
           "expected_outermost"]

STATUSES = ("converged", "iteration-cap", "line-search-failure", "outer-stall", "conditioning-error")


def lp_sigma(n: int) -> float:
    return 1.0 - 0.1 / math.sqrt(2.0 * n)


# sigma * tau within this relative distance of tau_end counts as reaching it, so that
# e.g. 0.1 * 0.1**7 does not leave a sliver of 1e-8 * (1 + 5e-16) for an extra pass
_CLAMP_SLACK = 1e-12


def update_tau(p: Params, consts: SolverConstants, n: int, lp_mode: bool = False) -> Params:
    sigma = lp_sigma(n) if lp_mode else consts.sigma
    tau = sigma * p.tau
    if tau <= consts.tau_end * (1.0 + _CLAMP_SLACK):
        tau = consts.tau_end
    return Params(tau, p.lam_hat.copy())


def expected_outermost(tau0: float, tau_end: float, sigma: float) -> int:
    """Number of geometric reductions ``tau <- max(sigma tau, tau_end)`` from tau0 to tau_end."""
    if tau0 <= tau_end:
        return 0
    return math.ceil(math.log(tau_end / tau0) / math.log(sigma) - _CLAMP_SLACK * 1e3)


def initialize(prob: ProblemSpec, consts: SolverConstants, x0=None):
    """Centered starting point: lam = lam_hat = 0 and ``mu * distance = tau0`` on both bounds."""
    if x0 is None:
        if prob.x0 is None:
            raise ValueError(f"problem {prob.name!r} has no default x0; pass one")
        x0 = prob.x0
    x0 = validate_initial_point(prob, consts, x0)
    tau0 = max(consts.tau_init, consts.tau_end)
    z = Iterate(
        x=x0.copy(),
        lam=np.zeros(prob.m),
        mu_L=tau0 / (x0 - prob.x_lower),
        mu_R=tau0 / (prob.x_upper - x0),
    )
    return z, Params(tau0, np.zeros(prob.m))


class TraceSink:
    """Collects trace records; optionally mirrors them as JSON lines to a stream."""

    def __init__(self, stream: Optional[IO[str]] = None):
        self.records: List[dict] = []
        self.stream = stream
        self.counters: Optional[Counters] = None

    def __call__(self, record: dict):
        rec = {"seq": len(self.records)}
        if self.counters is not None:
            rec["outermost_iter"] = self.counters.outermost
            rec["outer_iter"] = self.counters.outer
        rec.update(record)
        self.records.append(rec)
        if self.stream is not None:
            self.stream.write(json.dumps(_jsonable(rec)) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class SolveReport:
    status: str
    message: str
    x: np.ndarray
    lam: np.ndarray
    lam_hat: np.ndarray
    mu_L: np.ndarray
    mu_R: np.ndarray
    tau: float
    F_norm: float
    lam_norm: float
    grad_norm: float
    c_norm: float
    f_value: float
    phi_value: float
    certificate_bound: float
    certificate_ok: bool
    lp_mode: bool
    counters: Dict[str, int]
    problem: str = ""
    trace: List[dict] = field(default_factory=list, repr=False)
    inner_traces: list = field(default_factory=list, repr=False)
    aux_traces: list = field(default_factory=list, repr=False)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_dict(self) -> Dict[str, Any]:
        skip = {"trace", "inner_traces", "aux_traces"}
        return _jsonable({k: v for k, v in self.__dict__.items() if k not in skip})


def _refine(z, p, prob, consts, emit, counters):
    """Final refinement at tau_E: Newton polishing plus full (alpha = 1) multiplier updates.

    The solve loops stop at ``||F|| <= tol`` and ``||lambda|| <= tol``; the gradient
    of phi carries ``r_primal / omega`` and ``lambda * omega_tilde / omega``, so
    stationarity to ~tol needs both driven toward rounding level.
    """
    z = newton_polish(z, p, prob, consts, emit, counters)
    for _ in range(consts.max_refine):
        lam_norm = float(np.max(np.abs(z.lam)))
        if lam_norm == 0.0:
            break
        try:
            z_new, p_new, alpha = malm_step(z, p, prob, consts, counters=counters)
        except OuterStallError:
            break
        if alpha != 1.0:
            break
        z_new = newton_polish(z_new, p_new, prob, consts, emit, counters)
        F_new = eval_F(z_new, p_new, prob, consts).norm_inf()
        lam_new = float(np.max(np.abs(z_new.lam)))
        if F_new > consts.tol or not lam_new < lam_norm:
            break
        z, p = z_new, p_new
        if emit is not None:
            emit({"event": "refine_malm", "level": "outer", "tau": p.tau, "alpha": 1.0,
                  "F_norm": F_new, "lam_norm": lam_new,
                  "c_norm": float(np.max(np.abs(prob.eval_c(z.x))))})
    return z, p


def solve(prob: ProblemSpec, consts: Optional[SolverConstants] = None, x0=None,
          lp_mode: bool = False, trace_stream: Optional[IO[str]] = None,
          refine: bool = True) -> SolveReport:
    """Run the three nested loops and return a :class:`SolveReport`.

    ``lp_mode`` switches the barrier reduction to ``1 - 0.1/sqrt(2n)`` and leads
    every outer loop with a multiplier update; it requires ``prob.is_linear``.
    """
    consts = SolverConstants() if consts is None else consts
    if lp_mode and not prob.is_linear:
        raise ValueError("lp_mode requires an affine problem (is_linear=True)")
    z, p = initialize(prob, consts, x0)
    counters = Counters()
    sink = TraceSink(trace_stream)
    sink.counters = counters
    status, message = "converged", ""
    try:
        if p.tau <= consts.tau_end:
            z, p = outer_solve(z, p, prob, consts, emit=sink, counters=counters, lead_with_malm=lp_mode)
        while p.tau > consts.tau_end:
            if counters.outermost >= consts.max_outermost:
                status = "iteration-cap"
                message = f"outermost iteration cap {consts.max_outermost} reached at tau = {p.tau:.3e}"
                break
            p = update_tau(p, consts, prob.n, lp_mode)
            counters.outermost += 1
            sink({"event": "tau_update", "level": "outermost", "tau": p.tau,
                  "lam_norm": float(np.max(np.abs(z.lam))),
                  "F_norm": eval_F(z, p, prob, consts).norm_inf(),
                  "c_norm": float(np.max(np.abs(prob.eval_c(z.x))))})
            z, p = outer_solve(z, p, prob, consts, emit=sink, counters=counters, lead_with_malm=lp_mode)
        if status == "converged" and refine:
            z_ref, p_ref = _refine(z, p, prob, consts, sink, counters)
            # lambda is only pinned to about tol / (omega + omega_tilde) by ||F|| <= tol,
            # so keep the refined point only if it still meets the loop guards.
            if (float(np.max(np.abs(z_ref.lam))) <= consts.tol
                    and eval_F(z_ref, p_ref, prob, consts).norm_inf() <= consts.tol):
                z, p = z_ref, p_ref
    except LineSearchError as exc:
        status, message = "line-search-failure", str(exc)
    except (OuterStallError, AuxiliarySolveError) as exc:
        status, message = "outer-stall", str(exc)
    except ConditioningError as exc:
        status, message = "conditioning-error", str(exc)
    except NonConvergenceError as exc:
        status, message = "iteration-cap", str(exc)

    F_norm = eval_F(z, p, prob, consts).norm_inf()
    lam_norm = float(np.max(np.abs(z.lam)))
    grad = eval_grad_phi_funneled(z.x, prob, consts)
    grad_norm = float(np.max(np.abs(grad)))
    bound = 10.0 * consts.tol * (1.0 + float(np.max(np.abs(prob.eval_grad_f(z.x)))))
    if status == "converged" and not (p.tau == consts.tau_end and lam_norm <= consts.tol
                                      and F_norm <= consts.tol):
        status, message = "iteration-cap", "loop guards not satisfied at exit"
    cert_ok = status == "converged" and grad_norm <= bound
    report = SolveReport(
        status=status,
        message=message,
        x=z.x.copy(),
        lam=z.lam.copy(),
        lam_hat=p.lam_hat.copy(),
        mu_L=z.mu_L.copy(),
        mu_R=z.mu_R.copy(),
        tau=p.tau,
        F_norm=F_norm,
        lam_norm=lam_norm,
        grad_norm=grad_norm,
        c_norm=float(np.max(np.abs(prob.eval_c(z.x)))),
        f_value=float(prob.eval_f(z.x)),
        phi_value=eval_phi(z.x, prob, consts),
        certificate_bound=bound,
        certificate_ok=bool(cert_ok),
        lp_mode=lp_mode,
        counters={
            "outermost": counters.outermost,
            "outer": counters.outer,
            "inner_steps": counters.inner_steps,
            "aux_solves": counters.aux_solves,
            "aux_steps": counters.aux_steps,
            "polish_steps": counters.polish_steps,
            "factorizations": counters.factorizations,
            "inertia_shifts": counters.inertia_shifts,
        },
        problem=prob.name,
        trace=sink.records,
        inner_traces=counters.inner_traces,
        aux_traces=counters.aux_traces,
    )
    sink({"event": "done", "level": "outermost", "status": status, "tau": p.tau,
          "F_norm": F_norm, "lam_norm": lam_norm, "c_norm": report.c_norm,
          "grad_norm": grad_norm})
    return report
