"""Selling k copies of an item to one additive buyer: separate prices vs one bundle price."""

from bundlerev import DiscreteDistribution, brev, myerson_price, srev

# A buyer values each item at 0, 1 or 2, independently across items.
F = DiscreteDistribution([0.0, 1.0, 2.0], [0.5, 0.3, 0.2])

quote = myerson_price(F)
print(f"best single-item price {quote.price}, sells with prob {quote.sale_probability:.2f}, "
      f"revenue {quote.revenue:.3f}")

# Separate selling just repeats that price on every item.
for k in (1, 2, 4, 8):
    result = brev(F, k)
    print(f"k={k:2d}  SRev={srev(F, k):6.3f}  BRev={result.brev:6.3f}  "
          f"bundle price={result.bundle_price:4.1f}  ratio={result.ratio:.4f}")

# With many items the bundle wins: the sum concentrates around k * mean.
print(f"mean value {F.mean():.2f} vs single-item revenue {quote.revenue:.2f}")

# A two-point buyer at the binding instance: value 1 w.p. 2/3, k = 2 gives exactly 2/3.
G = DiscreteDistribution.two_point(1.0, 2 / 3)
print("two-point ratio at k=2:", round(brev(G, 2).ratio, 12))
