"""Plug in your own problem: a projection onto a line inside a box.

    minimize (x1 - 1)^2 + (x2 - 2)^2   subject to   x1 + x2 = 1,   -2 <= x <= 2

The answer is x = (0, 1): the point of the line closest to (1, 2).
"""
import numpy as np

from malmip import ProblemSpec, solve

target = np.array([1.0, 2.0])

prob = ProblemSpec(
    n=2,
    m=1,
    eval_f=lambda x: float(np.sum((x - target) ** 2)),
    eval_grad_f=lambda x: 2.0 * (x - target),
    eval_c=lambda x: np.array([x[0] + x[1] - 1.0]),
    # constraint gradients are stored as columns: shape (n, m)
    eval_jac_c=lambda x: np.array([[1.0], [1.0]]),
    # Hessian of f - y'c; c is affine so only f contributes
    eval_hess_lagrangian=lambda x, y: 2.0 * np.eye(2),
    x_lower=np.full(2, -2.0),
    x_upper=np.full(2, 2.0),
    name="projection",
    x0=np.array([0.5, 0.5]),  # c(x0) = 0, comfortably inside the funnel |c| < 0.1
)

report = solve(prob)
print(report.status, report.x)
assert np.allclose(report.x, [0.0, 1.0], atol=1e-6)

# The constraint multiplier ends up in lam_hat: grad f = J * lam_hat at the solution,
# here 2 * ((0, 1) - (1, 2)) = -2 * (1, 1).  Its penalty residual c + omega * lam_hat is tiny.
print("lam_hat =", report.lam_hat, " residual c + omega lam_hat =",
      prob.eval_c(report.x) + 1e-8 * report.lam_hat)
