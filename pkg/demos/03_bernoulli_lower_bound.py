"""Exact ratios for Bernoulli buyers with finite k, swept over the expected sum c."""

from bundlerev import constants
from bundlerev.verifier import bernoulli_sweep, check_k2, check_k3

r_star = constants().r_star

# Two and three items have their own closed forms.
k2 = check_k2()
print(f"k=2: min ratio {k2.data['min_ratio']:.9f} at c = {k2.data['argmin_c']:.6f}")
k3 = check_k3()
print(f"k=3: min ratio {k3.data['min_exact_ratio']:.6f}, case floors {k3.data['case_minima']}")

# For k >= 4 the exact convolution is swept on a 1e-3 grid.
for k in (4, 5, 6, 8, 10, 12, 20):
    cs, ratios = bernoulli_sweep(k, step=1e-3)
    i = ratios.argmin()
    print(f"k={k:2d}: min {ratios[i]:.6f} at c = {cs[i]:.3f}   gap to r* = {ratios[i] - r_star:+.5f}")

# The gap closes slowly; k = 12 is still about 0.02 above the limit.
