"""Small constructions shared by unit tests."""
import numpy as np

from malmip import Iterate, Params, ProblemSpec, SolverConstants, make_problem
from malmip.derivcheck import sample_state


def toy_box(rho_S=None, n=1):
    """f = 0, c = 0 (one constraint with zero gradient) on the box (0, 2)^n."""
    return ProblemSpec(
        n=n, m=1,
        eval_f=lambda x: 0.0, eval_grad_f=lambda x: np.zeros(n),
        eval_c=lambda x: np.zeros(1), eval_jac_c=lambda x: np.zeros((n, 1)),
        eval_hess_lagrangian=lambda x, y: np.zeros((n, n)),
        x_lower=np.zeros(n), x_upper=np.full(n, 2.0), S=rho_S, is_linear=True, name="toy",
    )


def random_states(name, count, seed=0, consts=None, **kwargs):
    prob = make_problem(name, **kwargs)
    consts = SolverConstants() if consts is None else consts
    rng = np.random.default_rng(seed)
    return prob, consts, [sample_state(prob, consts, rng) for _ in range(count)]


def central_root(prob, consts, x, lam, tau):
    """A point with F(z, p) = 0 exactly, built by choosing lam_hat and replacing f by a linear term.

    Returns ``(prob_linear_f, z, p)`` where the returned problem shares c with ``prob``.
    """
    from malmip.residuals import eval_w
    x = np.asarray(x, dtype=float)
    c = np.asarray(prob.eval_c(x), dtype=float)
    J = np.asarray(prob.eval_jac_c(x), dtype=float)
    lam_hat = -(c + (consts.omega + consts.omega_tilde) * lam) / consts.omega
    d_L, d_R = x - prob.x_lower, prob.x_upper - x
    mu_L, mu_R = tau / d_L, tau / d_R
    g = J @ (lam_hat + lam + eval_w(c, consts)) - consts.rho * prob.S @ x + mu_L - mu_R
    hess_c = prob.eval_hess_lagrangian  # f part is dropped below only for affine f

    lin = ProblemSpec(
        n=prob.n, m=prob.m,
        eval_f=lambda v: float(g @ v), eval_grad_f=lambda v: g,
        eval_c=prob.eval_c, eval_jac_c=prob.eval_jac_c,
        eval_hess_lagrangian=lambda v, y: hess_c(v, y) if not prob.is_linear else np.zeros((prob.n, prob.n)),
        x_lower=prob.x_lower, x_upper=prob.x_upper, S=prob.S, is_linear=prob.is_linear,
        name=prob.name + "/central",
    )
    return lin, Iterate(x.copy(), np.array(lam, dtype=float), mu_L, mu_R), Params(tau, lam_hat)
