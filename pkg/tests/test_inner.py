import numpy as np
import pytest

import malmip.inner as inner_mod
from malmip import LineSearchError, NonConvergenceError, Params, SolverConstants, make_problem
from malmip.driver import initialize
from malmip.inner import inner_solve
from malmip.merit import MeritValue, eval_M
from malmip.residuals import eval_F
from helpers import central_root

C = SolverConstants()


def _cold(name, tau=1e-2):
    prob = make_problem(name)
    z, p = initialize(prob, C)
    return prob, z, Params(tau, p.lam_hat)


def test_converged_start_takes_no_steps():
    prob = make_problem("cvxqp")
    lin, z, p = central_root(prob, C, prob.x0, np.zeros(prob.m), 0.01)
    z_out, trace = inner_solve(z, p, lin, C)
    assert trace.steps == 0
    np.testing.assert_array_equal(z_out.as_vector(), z.as_vector())


def test_cvxqp_quadratic_tail_and_full_final_step():
    prob, z, p = _cold("cvxqp")
    z, trace = inner_solve(z, p, prob, C)
    assert eval_F(z, p, prob, C).norm_inf() <= C.tol
    assert trace.records[-1].alpha == 1.0
    r = [v for v in trace.residuals if v > 1e-13]
    assert len(r) >= 3
    ratios = [r[k + 1] / r[k] ** 2 for k in range(len(r) - 3, len(r) - 1)]
    assert max(ratios) < 1e4


@pytest.mark.parametrize("name", ["cvxqp", "rosenbrock-eq", "cubic1d", "overdet", "lp2"])
def test_trace_certificates(name):
    prob, z, p = _cold(name, tau=1e-3)
    start = z.copy()
    z, trace = inner_solve(z, p, prob, C)
    M_prev = eval_M(start, p, prob, C).value
    for rec in trace.records:
        assert rec.alpha0 == min(1.0, C.theta * rec.alpha_box)
        assert rec.alpha == rec.alpha0 * C.backtrack ** rec.backtracks
        assert rec.M == M_prev
        if rec.rule == "armijo":
            assert rec.M_new <= rec.M + C.armijo_c * rec.alpha * rec.slope
            assert rec.M_new < rec.M
        else:
            assert rec.F_norm_new < rec.F_norm
        assert rec.slope < 0.0
        assert rec.c_norm_new < C.epsilon
        M_prev = rec.M_new
    assert z.in_F(prob)
    assert trace.residuals[-1] <= C.tol


def test_interior_preserved_each_step():
    prob, z, p = _cold("rosenbrock-eq", tau=1e-4)
    seen = []
    inner_solve(z, p, prob, C, emit=seen.append)
    assert seen and all(r["event"] == "inner_step" for r in seen)
    assert all(r["alpha"] < r["alpha_box"] for r in seen)


def test_lp_small_tau_reduction_needs_at_most_two_steps():
    prob = make_problem("randlp")
    z, p = initialize(prob, C)
    z, _ = inner_solve(z, p, prob, C)
    z, trace = inner_solve(z, Params(0.98 * p.tau, p.lam_hat), prob, C)
    assert 1 <= trace.steps <= 2


def test_iteration_cap_carries_trace():
    prob, z, p = _cold("cvxqp")
    with pytest.raises(NonConvergenceError) as info:
        inner_solve(z, p, prob, C, max_iter=1)
    assert info.value.trace.steps == 1


def test_line_search_failure(monkeypatch):
    prob, z, p = _cold("cvxqp")
    real = eval_M
    start = z.as_vector()

    def only_start(zz, pp, prob_, consts):
        if np.array_equal(zz.as_vector(), start):
            return real(zz, pp, prob_, consts)
        return MeritValue(np.inf, False)

    monkeypatch.setattr(inner_mod, "eval_M", only_start)
    with pytest.raises(LineSearchError) as info:
        inner_solve(z, p, prob, C.replace(max_backtracks=5))
    assert info.value.slope < 0
