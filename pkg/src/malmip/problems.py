"""Registry of small built-in test problems."""
from __future__ import annotations

import numpy as np

from .errors import RegistryError
from .problem import ProblemSpec

__all__ = ["make_problem", "list_problems", "PROBLEMS"]


def _lp2():
    # f = x1, c = 0.5 x1 - x2 on [0, 1]^2
    a = np.array([0.5, -1.0])
    return ProblemSpec(
        n=2,
        m=1,
        eval_f=lambda x: float(x[0]),
        eval_grad_f=lambda x: np.array([1.0, 0.0]),
        eval_c=lambda x: np.array([a @ x]),
        eval_jac_c=lambda x: a.reshape(2, 1).copy(),
        eval_hess_lagrangian=lambda x, y: np.zeros((2, 2)),
        x_lower=np.zeros(2),
        x_upper=np.ones(2),
        is_linear=True,
        name="lp2",
        x0=np.array([0.5, 0.25]),
    )


def _cubic1d():
    # constraint is identically zero, so the problem is box-constrained only
    return ProblemSpec(
        n=1,
        m=1,
        eval_f=lambda x: float(x[0] ** 3 + 0.1 * x[0]),
        eval_grad_f=lambda x: np.array([3.0 * x[0] ** 2 + 0.1]),
        eval_c=lambda x: np.zeros(1),
        eval_jac_c=lambda x: np.zeros((1, 1)),
        eval_hess_lagrangian=lambda x, y: np.array([[6.0 * x[0]]]),
        x_lower=np.array([-1.0]),
        x_upper=np.array([2.0]),
        name="cubic1d",
        x0=np.array([0.5]),
    )


def _affine_constraints(A, b):
    At = A.T.copy()
    return (lambda x: A @ x - b), (lambda x: At.copy())


def _cvxqp(n=10, m=3, seed=0):
    rng = np.random.default_rng(seed)
    Q_basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q_basis @ np.diag(np.linspace(0.5, 5.0, n)) @ Q_basis.T
    Q = 0.5 * (Q + Q.T)
    q = rng.standard_normal(n)
    A = rng.standard_normal((m, n))
    x_feas = rng.uniform(-0.5, 0.5, n)
    b = A @ x_feas
    eval_c, eval_jac_c = _affine_constraints(A, b)
    return ProblemSpec(
        n=n,
        m=m,
        eval_f=lambda x: float(0.5 * x @ Q @ x + q @ x),
        eval_grad_f=lambda x: Q @ x + q,
        eval_c=eval_c,
        eval_jac_c=eval_jac_c,
        eval_hess_lagrangian=lambda x, y: Q.copy(),
        x_lower=-np.ones(n),
        x_upper=np.ones(n),
        name="cvxqp",
        x0=x_feas,
    )


def _overdet(n=4, seed=1):
    # m = 2n affine constraints with a consistent right-hand side
    m = 2 * n
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    x_feas = rng.uniform(-0.5, 0.5, n)
    b = A @ x_feas
    target = rng.uniform(-1.0, 1.0, n)
    eval_c, eval_jac_c = _affine_constraints(A, b)
    return ProblemSpec(
        n=n,
        m=m,
        eval_f=lambda x: float(0.5 * np.sum((x - target) ** 2) + 0.25 * np.sum(x ** 4)),
        eval_grad_f=lambda x: (x - target) + x ** 3,
        eval_c=eval_c,
        eval_jac_c=eval_jac_c,
        eval_hess_lagrangian=lambda x, y: np.diag(1.0 + 3.0 * x ** 2),
        x_lower=-np.ones(n),
        x_upper=np.ones(n),
        name="overdet",
        x0=x_feas,
    )


def _rosenbrock_eq():
    # Rosenbrock objective restricted to the unit circle
    def f(x):
        return float((1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2)

    def grad(x):
        return np.array([
            -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] ** 2),
            200.0 * (x[1] - x[0] ** 2),
        ])

    def hess_lag(x, y):
        h = np.array([
            [2.0 - 400.0 * (x[1] - 3.0 * x[0] ** 2), -400.0 * x[0]],
            [-400.0 * x[0], 200.0],
        ])
        return h - y[0] * 2.0 * np.eye(2)

    return ProblemSpec(
        n=2,
        m=1,
        eval_f=f,
        eval_grad_f=grad,
        eval_c=lambda x: np.array([x[0] ** 2 + x[1] ** 2 - 1.0]),
        eval_jac_c=lambda x: (2.0 * x).reshape(2, 1),
        eval_hess_lagrangian=hess_lag,
        x_lower=np.array([-1.5, -1.5]),
        x_upper=np.array([1.5, 1.5]),
        name="rosenbrock-eq",
        x0=np.array([0.6, 0.8]),
    )


def _randlp(n=20, m=10, seed=2):
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n)
    A = rng.standard_normal((m, n))
    x_feas = rng.uniform(0.25, 0.75, n)
    b = A @ x_feas
    eval_c, eval_jac_c = _affine_constraints(A, b)
    return ProblemSpec(
        n=n,
        m=m,
        eval_f=lambda x: float(q @ x),
        eval_grad_f=lambda x: q.copy(),
        eval_c=eval_c,
        eval_jac_c=eval_jac_c,
        eval_hess_lagrangian=lambda x, y: np.zeros((n, n)),
        x_lower=np.zeros(n),
        x_upper=np.ones(n),
        is_linear=True,
        name="randlp",
        x0=x_feas,
    )


PROBLEMS = {
    "lp2": (_lp2, "2-variable LP: f = x1, c = 0.5 x1 - x2, box [0,1]^2"),
    "cubic1d": (_cubic1d, "nonconvex 1-D: f = x^3 + 0.1 x on [-1, 2], c = 0"),
    "cvxqp": (_cvxqp, "seeded strictly convex QP, n=10, m=3, box [-1,1]^n"),
    "overdet": (_overdet, "m = 2n consistent affine constraints, quartic objective, n=4"),
    "rosenbrock-eq": (_rosenbrock_eq, "Rosenbrock on the unit circle x1^2 + x2^2 = 1"),
    "randlp": (_randlp, "seeded random LP, n=20, m=10, box [0,1]^n"),
}


def list_problems():
    return {name: doc for name, (_, doc) in PROBLEMS.items()}


def make_problem(name: str, **kwargs) -> ProblemSpec:
    """Construct a registry problem; keyword arguments reach the factory (sizes, seeds)."""
    try:
        factory, _ = PROBLEMS[name]
    except KeyError:
        raise RegistryError(
            f"unknown problem {name!r}; available: {', '.join(sorted(PROBLEMS))}"
        ) from None
    return factory(**kwargs)
