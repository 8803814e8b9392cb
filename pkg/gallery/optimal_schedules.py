"""How much work does a target accuracy cost?

For each target eps we build the Lagrange-optimal schedule and compare it with
the plain quadratic schedule n_k = k^2 run until its bound drops below eps.
Both are run on Example C; the plot shows points computed vs guaranteed error.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from gifs import builtin, error_bound, grid_run, optimal_plan, quadratic_schedule, schedule_from_plan

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
system = builtin("C")
C, D, M, p = system.C, system.D, system.M, system.p

rows = []
for eps in (0.4, 0.2, 0.1, 0.05, 0.03):
    plan = optimal_plan(eps, C, D, M, p)
    opt = schedule_from_plan(plan)
    # smallest quadratic schedule meeting the same target
    k = 1
    while error_bound(quadratic_schedule(k, D, M), C) > eps:
        k += 1
    quad = quadratic_schedule(k, D, M)
    costs = {}
    for name, sched in (("optimal", opt), ("quadratic", quad)):
        _, stats, _ = grid_run(system, schedule=sched)
        costs[name] = (stats.total_tuples, error_bound(sched, C), len(sched))
    rows.append((eps, costs))
    print(f"eps {eps:<5}  optimal: N={plan.N:>3} tuples={costs['optimal'][0]:>10}  "
          f"quadratic: N={k:>3} tuples={costs['quadratic'][0]:>10}")

# The first steps of an optimal schedule are coarse on purpose: their error is
# multiplied by a high power of C before it reaches the final picture.
plan = optimal_plan(0.05, C, D, M, p)
print("eps_k^0 of the 0.05 plan (first, middle, last):",
      [f"{plan.eps0[i]:.3g}" for i in (0, plan.N // 2, -1)])

fig, ax = plt.subplots(figsize=(6, 4))
for name, marker in (("optimal", "o"), ("quadratic", "s")):
    ax.loglog([c[name][1] for _, c in rows], [c[name][0] for _, c in rows], marker, ls="-", label=name)
ax.set(xlabel="a priori error bound", ylabel="map evaluations", title="Example C")
ax.invert_xaxis()
ax.legend()
fig.tight_layout()
fig.savefig(out / "optimal_schedules.png", dpi=150)
print("predicted grid cost exponent pM =", p * M, "| diameter", round(D * math.sqrt(M), 4))
