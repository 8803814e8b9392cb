"""Example A drawn twice: the deterministic algorithm and the grid algorithm.

The deterministic algorithm applies every map to every pair of points it has,
so the set grows like 3 * |A_k|^2. Four steps already take about eight million
points; the grid algorithm gets a comparable picture from a few dozen lattice
points because everything is snapped to an n_k x n_k grid and deduplicated.

    python gallery/example_a_two_algorithms.py            # 3 deterministic steps, ~1 s
    python gallery/example_a_two_algorithms.py --det 4    # the full run, ~10 s
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from gifs import builtin, deterministic_run, grid_run, hausdorff, quadratic_schedule
from gifs.complexity import accuracy_factor

ap = argparse.ArgumentParser()
ap.add_argument("--det", type=int, default=3, help="deterministic steps")
ap.add_argument("--grid", type=int, default=8, help="grid steps (quadratic schedule)")
ap.add_argument("--out", default=Path(__file__).parent / "output", type=Path)
args = ap.parse_args()
args.out.mkdir(parents=True, exist_ok=True)

system = builtin("A")
print(f"certified contraction constant C = {system.C:.6f}")

# --- deterministic -----------------------------------------------------------
det, det_stats = deterministic_run(system, steps=args.det)
for r in det_stats.records:
    print(f"det  step {r.step}: {r.tuples:>10} tuples -> {r.points:>9} points  ({r.millis:7.1f} ms)")

# --- grid ----------------------------------------------------------------------
sched = quadratic_schedule(args.grid, system.D, system.M)
grid, grid_stats, _ = grid_run(system, schedule=sched)
for r in grid_stats.records:
    print(f"grid step {r.step}: n = {sched.n[r.step - 1]:>3}, {r.points:>5} points, bound {r.bound:.4f}")

# The distance between the two pictures is controlled by both a priori bounds.
h = hausdorff(det, grid).h
det_bound = system.C ** args.det * accuracy_factor(system)
print(f"h(det, grid) = {h:.5f}   det bound {det_bound:.5f} + grid bound {grid_stats.records[-1].bound:.5f}")

fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
for ax, pts, title in ((axes[0], det, f"deterministic, {args.det} steps, {len(det)} points"),
                       (axes[1], grid, f"grid, {args.grid} steps, {len(grid)} points")):
    ax.scatter(pts.points[:, 0], pts.points[:, 1], s=0.2 if len(pts) > 1000 else 4, c="k", lw=0)
    ax.set(aspect="equal", title=title)  # the attractor sits near the origin; zoom to it
fig.tight_layout()
fig.savefig(args.out / "example_a_two_algorithms.png", dpi=150)

# The printed f3 is not symmetric in its two arguments; the variant that is
# looks noticeably different, which is worth knowing when comparing figures.
sym = builtin("A", symmetric_f3=True)
alt, _, _ = grid_run(sym, schedule=sched)
fig, ax = plt.subplots(figsize=(5, 5))
ax.scatter(alt.points[:, 0], alt.points[:, 1], s=4, c="k", lw=0)
ax.set(aspect="equal", title=f"symmetric f3 variant, {len(alt)} points")
fig.savefig(args.out / "example_a_symmetric_f3.png", dpi=150)
print(f"wrote images to {args.out}")
