"""Where the worst-case bundling ratio comes from, and the per-segment pricing table."""

import sys

import numpy as np

from bundlerev import build_table, bundle_ratio, constants, figure_data, h

cert = constants()
print(f"c* = {cert.c_star:.10f}")
print(f"r* = {cert.r_star:.10f}   (residual of 2 h_2 = 3 h_3: {cert.residual:.1e})")

# At c*, prices 2 and 3 earn the same normalised revenue.
c = cert.c_star
print("2 h_2(c*)/c* =", 2 * h(2, c) / c, " 3 h_3(c*)/c* =", 3 * h(3, c) / c)

print("\n d    c_low    c_high   ratio_low ratio_high")
for seg in build_table(40):
    print(f"{seg.d:2d} {seg.c_low:8.4f} {seg.c_high:9.4f}   {seg.ratio_low:.4f}    {seg.ratio_high:.4f}")

# The lower envelope over integer prices never drops below r*.
grid = np.linspace(0.05, 12, 600)
envelope = [max(bundle_ratio(d, x) for d in range(1, 12)) for x in grid]
print(f"\nenvelope minimum on (0, 12]: {min(envelope):.6f} at c = {grid[int(np.argmin(envelope))]:.3f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib not installed; skipping the plot")

rows = figure_data(8, grid)
fig, ax = plt.subplots(figsize=(7, 4))
for d in range(1, 9):
    ax.plot(grid, [r for _, dd, r in rows if dd == d], lw=1, label=f"d={d}")
ax.axhline(cert.r_star, color="k", ls=":", lw=0.8)
ax.set_ylim(0.3, 1.02)
ax.set_xlabel("c")
ax.set_ylabel("d h_d(c) / c")
ax.legend(ncol=4, fontsize=8)
fig.tight_layout()
fig.savefig("bundle_ratio_curves.png", dpi=120)
print("wrote bundle_ratio_curves.png")
