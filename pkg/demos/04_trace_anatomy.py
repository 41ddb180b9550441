"""Read a solve trace: which loop did what, level by level.

Every record has an ``event`` and a ``level`` (outermost / outer / inner); the
driver stamps each one with the current outermost and outer counters.
"""
import collections
import io
import json

from malmip import make_problem, solve

buf = io.StringIO()
report = solve(make_problem("rosenbrock-eq"), trace_stream=buf)
records = [json.loads(line) for line in buf.getvalue().splitlines()]
print(report.status, "with", len(records), "trace records")

print(collections.Counter(r["event"] for r in records))

# Per barrier level: multiplier updates taken and the step sizes they settled on.
by_level = collections.defaultdict(list)
for r in records:
    if r["event"] == "malm_accept":
        by_level[r["tau"]].append(r["alpha"])
for tau, alphas in sorted(by_level.items(), reverse=True):
    full = sum(a == 1.0 for a in alphas)
    print(f"tau = {tau:8.1e}: {len(alphas):4d} updates, {full:4d} full steps, smallest alpha {min(alphas):.2e}")

# Rejected trials record why they were rejected.
reasons = collections.Counter(r["status"] for r in records if r["event"] == "malm_trial")
print("trial outcomes:", dict(reasons))

# The inner loop: every accepted step was a descent direction for the merit function.
inner = [r for r in records if r["event"] == "inner_step"]
print("inner steps:", len(inner), " max slope:", max(r["slope"] for r in inner))
