"""Cost models: grid vs deterministic, and the classical IFS for comparison.

Everything is in natural-log scale. The deterministic cost is a tower of
exponentials whose logarithm alone can exceed 1e300 when C is close to 1.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import mpmath

from gifs import CostParams, builtin, cost_ifs, ratio_table
from gifs.complexity import geometric_eps, ratio_csv

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
eps = geometric_eps(0.5, 1e-6, per_decade=4)

fig, ax = plt.subplots(figsize=(6, 4))
for C in (0.3, builtin("A").C, 0.7, 0.9):
    table = ratio_table(eps, CostParams(1, 3, 2, 2, C))
    # log10 of |ln ratio| keeps the tower readable on one axis
    y = [float(mpmath.sign(r.ln_ratio) * mpmath.log10(1 + abs(r.ln_ratio))) for r in table]
    ax.semilogx(eps, y, label=f"C = {C:.3f}")
ax.axhline(0, color="0.6", lw=0.8)
ax.set(xlabel="eps", ylabel="sign * log10(1 + |ln(C_g / C_c)|)",
       title="below zero the grid algorithm is cheaper")
ax.invert_xaxis()
ax.legend()
fig.tight_layout()
fig.savefig(out / "cost_ratio.png", dpi=150)

(out / "cost_ratio_example_a.csv").write_text(
    ratio_csv(ratio_table(geometric_eps(0.1, 1e-6), CostParams(1, 3, 2, 2, builtin("A").C))))

for C in (0.5, 0.9, 0.99):
    print(f"IFS with L = 2, C = {C}: {mpmath.nstr(mpmath.exp(cost_ifs(0.1, 2, C).ln), 4)} points for eps = 0.1")
