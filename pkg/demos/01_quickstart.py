"""Solve a built-in convex QP and look at what the report carries."""
import numpy as np

from malmip import check_derivatives, make_problem, solve

prob = make_problem("cvxqp")  # seeded: n=10 variables, m=3 equality constraints, box [-1, 1]
print(prob.name, "n =", prob.n, "m =", prob.m)

# Before trusting any solve, compare every analytic derivative with finite differences.
deriv = check_derivatives(prob, n_points=5)
print("derivatives ok:", deriv.passed)

report = solve(prob)
print("status:", report.status)
print("x =", np.round(report.x, 6))
print("||c(x)||_inf =", report.c_norm)

# The stationarity certificate: gradient of the penalty-barrier objective plus funnel terms.
print(f"||grad(phi + funnel)|| = {report.grad_norm:.2e} <= {report.certificate_bound:.2e}:",
      report.certificate_ok)

# Counters show how work splits across the three loops.
for key, value in report.counters.items():
    print(f"  {key:15s} {value}")
