import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from malmip import DomainError, Iterate, Params, SolverConstants, make_problem
from malmip.derivcheck import fd_gradient, relative_error, sample_state
from malmip.merit import directional_derivative, eval_grad_M, eval_M
from malmip.residuals import eval_DF, eval_F
from malmip.saddle import solve_step
from helpers import central_root, toy_box

C = SolverConstants()


def _state_fd(z, p, prob, consts, h0=6e-6):
    n, m = prob.n, prob.m
    v = z.as_vector()
    h = h0 * np.maximum(1.0, np.abs(v))
    h[n + m:] = h0 * np.abs(v[n + m:])
    return fd_gradient(lambda u: eval_M(Iterate.from_vector(u, n, m), p, prob, consts).value, v, h)


@pytest.mark.parametrize("name", ["cvxqp", "rosenbrock-eq"])
def test_grad_M_matches_fd(name):
    prob = make_problem(name)
    rng = np.random.default_rng(21)
    for _ in range(20):
        z, p = sample_state(prob, C, rng)
        assert relative_error(eval_grad_M(z, p, prob, C), _state_fd(z, p, prob, C)) <= 1e-5


def test_grad_M_matches_fd_funnel_off():
    prob = make_problem("overdet")
    consts = C.replace(tau_tilde=0.0)
    rng = np.random.default_rng(22)
    for _ in range(10):
        z, p = sample_state(prob, consts, rng)
        assert relative_error(eval_grad_M(z, p, prob, consts), _state_fd(z, p, prob, consts)) <= 1e-5


def test_toy_merit_hand_value():
    """f = 0, c = 0, box (0, 2), x = 1, mu = tau: barrier and proximity vanish."""
    prob = toy_box()
    tau = 0.3
    z = Iterate(np.array([1.0]), np.zeros(1), np.array([tau]), np.array([tau]))
    M = eval_M(z, Params(tau, np.zeros(1)), prob, C)
    expected = -2.0 * C.tau_tilde * np.log(C.epsilon) + 0.5 * C.rho
    assert M.domain_ok
    assert M.value == pytest.approx(expected, rel=1e-14)


def test_proximity_terms_nonpositive_contribution():
    prob = toy_box()
    tau = 0.3
    p = Params(tau, np.zeros(1))
    base = eval_M(Iterate(np.array([1.0]), np.zeros(1), np.array([tau]), np.array([tau])), p, prob, C).value
    for scale in (0.1, 0.5, 2.0, 10.0):
        z = Iterate(np.array([1.0]), np.zeros(1), np.array([tau * scale]), np.array([tau]))
        # moving mu_L off centrality raises M because -(log u + 1 - u) >= 0
        assert eval_M(z, p, prob, C).value > base


def test_dM_dmu_formula():
    prob = make_problem("cvxqp")
    z, p = sample_state(prob, C, np.random.default_rng(2))
    g = eval_grad_M(z, p, prob, C)
    n, m = prob.n, prob.m
    d_L = z.x - prob.x_lower
    expected = -C.nu * p.tau * (1.0 / z.mu_L - d_L / p.tau)
    np.testing.assert_allclose(g[n + m:2 * n + m], expected, rtol=1e-12)
    z.mu_L = p.tau / d_L
    g = eval_grad_M(z, p, prob, C)
    assert np.max(np.abs(g[n + m:2 * n + m])) <= 1e-12 * np.max(z.mu_L * d_L)


def test_outside_domain_is_sentinel():
    prob = make_problem("lp2")
    p = Params(0.1, np.zeros(1))
    outside_box = Iterate(np.array([1.5, 0.5]), np.zeros(1), np.ones(2), np.ones(2))
    outside_funnel = Iterate(np.array([0.5, 0.1]), np.zeros(1), np.ones(2), np.ones(2))  # c = 0.15
    bad_dual = Iterate(np.array([0.5, 0.25]), np.zeros(1), np.array([1.0, -1.0]), np.ones(2))
    for z in (outside_box, outside_funnel, bad_dual):
        M = eval_M(z, p, prob, C)
        assert M.value == np.inf and not M.domain_ok
    with pytest.raises(DomainError):
        eval_grad_M(outside_box, p, prob, C)


@pytest.mark.parametrize("name", ["cvxqp", "rosenbrock-eq", "lp2"])
def test_central_point_is_merit_stationary(name):
    prob = make_problem(name)
    rng = np.random.default_rng(8)
    # x0 is feasible for these problems, which keeps lam_hat = O(1)
    lam = 1e-4 * rng.standard_normal(prob.m)
    lin, z, p = central_root(prob, C, prob.x0, lam, 0.01)
    assert eval_F(z, p, lin, C).norm_inf() <= 1e-12
    assert np.max(np.abs(eval_grad_M(z, p, lin, C))) <= 10 * C.tol
    # small step: the 1/omega_tilde terms give M a large third derivative
    assert np.max(np.abs(_state_fd(z, p, lin, C, h0=1e-7))) <= 10 * C.tol


def test_directional_derivative_trivia():
    prob = make_problem("cvxqp")
    z, p = sample_state(prob, C, np.random.default_rng(3))
    g = eval_grad_M(z, p, prob, C)
    assert directional_derivative(z, p, np.zeros_like(g), prob, C) == 0.0
    assert directional_derivative(z, p, -g, prob, C) < 0.0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["cvxqp", "rosenbrock-eq", "cubic1d", "overdet", "lp2"]),
       st.integers(0, 2**31 - 1))
def test_newton_step_is_descent(name, seed):
    """Any solve_step output is a descent direction for M, shifted or not."""
    prob = make_problem(name)
    z, p = sample_state(prob, C, np.random.default_rng(seed))
    F = eval_F(z, p, prob, C)
    step = solve_step(F, eval_DF(z, p, prob, C), C)
    slope = directional_derivative(z, p, step.dz, prob, C, F=F)
    assert slope < 0.0


def test_M_never_nan():
    prob = make_problem("rosenbrock-eq")
    rng = np.random.default_rng(4)
    for _ in range(200):
        v = rng.uniform(-3, 3, 3 * prob.n + prob.m)
        z = Iterate.from_vector(v, prob.n, prob.m)
        M = eval_M(z, Params(10 ** rng.uniform(-8, 0), rng.standard_normal(1)), prob, C)
        assert not np.isnan(M.value)
        assert M.domain_ok == np.isfinite(M.value)
