"""LP mode: a slow barrier schedule under which every outer step is exact.

For affine f and c the auxiliary system solved in each multiplier update is the
same equation as F = 0, so the update recenters the iterate on its own and the
inner Newton loop has nothing left to do.
"""
import math

from malmip import make_problem, solve
from malmip.driver import lp_sigma

prob = make_problem("randlp")  # seeded, n=20, m=10, box [0, 1]
report = solve(prob, lp_mode=True)

sigma = lp_sigma(prob.n)
predicted = math.ceil(math.log(1e-8 / 0.1) / math.log(sigma))
trials = [r for r in report.trace if r["event"] == "malm_trial"]

print(f"sigma = {sigma:.5f}; barrier reductions: {report.counters['outermost']} (predicted {predicted})")
print("inner Newton steps:", report.counters["inner_steps"])
print("multiplier trials:", len(trials), "all with alpha = 1:", all(t["alpha"] == 1.0 for t in trials))
print("status:", report.status, " objective:", report.f_value)

# The same run on the 2-variable example takes 315 reductions and about 15 s:
#   solve(make_problem("lp2"), lp_mode=True)
