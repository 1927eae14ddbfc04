"""Building a finite instance whose ratio sits within epsilon of r*."""

from bundlerev import brev, build_tight_witness, constants

r_star = constants().r_star
for eps in (0.05, 0.02, 0.01):
    k, family, check = build_tight_witness(eps)
    print(f"eps={eps:<5} k={k:5d}  q={family.q:.6f}  ratio={check.data['ratio']:.6f}  "
          f"(target below {r_star + eps:.6f})")

# Re-derive the first one by direct convolution.
k, family, _ = build_tight_witness(0.05)
direct = brev(family.distribution(), k)
print(f"direct check k={k}: ratio {direct.ratio:.6f}, bundle price {direct.bundle_price}")
