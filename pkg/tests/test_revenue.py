
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bundlerev.distcore import BernoulliFamily, DiscreteDistribution, binomial_cdf
from bundlerev.errors import CapacityError, DegenerateDistributionError, DomainError
from bundlerev.revenue import RevenueQuote, brev, brev_at_price, myerson_price, srev

from oracles import best_bundle_price, best_single_price

THREE_POINT = DiscreteDistribution([0, 1, 2], [0.5, 0.3, 0.2])


def random_dist(rng, max_support):
    while True:
        size = int(rng.integers(1, max_support + 1))
        support = np.sort(rng.choice(np.arange(0, 10.5, 0.5), size=size, replace=False))
        w = rng.uniform(size=size)
        if support[-1] > 0:
            return DiscreteDistribution(support, w / w.sum())


class TestMyerson:
    def test_bernoulli(self):
        quote = myerson_price(DiscreteDistribution.two_point(1.0, 0.3))
        assert (quote.price, quote.revenue) == (1.0, pytest.approx(0.3))

    def test_bernoulli_family_revenue_is_mean_over_k(self):
        fam = BernoulliFamily(2.655, 7)
        assert myerson_price(fam.distribution()).revenue == pytest.approx(2.655 / 7, abs=1e-15)

    def test_tie_goes_low(self):
        quote = myerson_price(DiscreteDistribution([1, 2], [0.5, 0.5]))
        assert quote.price == 1.0 and quote.revenue == 1.0 and quote.sale_probability == 1.0

    def test_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            myerson_price(DiscreteDistribution.point_mass(0.0))
        with pytest.raises(DegenerateDistributionError):
            myerson_price(DiscreteDistribution([0, 3], [1.0, 0.0]))

    def test_quote_consistency(self):
        q = myerson_price(THREE_POINT)
        assert q.revenue == pytest.approx(q.price * q.sale_probability, abs=1e-12)
        assert 0 <= q.sale_probability <= 1

    def test_against_enumeration(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            dist = random_dist(rng, 6)
            rev, price = best_single_price(dist.support.tolist(), dist.probs.tolist())
            quote = myerson_price(dist)
            assert quote.revenue == pytest.approx(rev, abs=1e-12)
            assert quote.price == price


class TestSrev:
    def test_bernoulli(self):
        assert srev(DiscreteDistribution.two_point(1.0, 0.25), 4) == pytest.approx(1.0)

    @pytest.mark.parametrize("p,q,k", [(3.0, 0.4, 5), (0.5, 0.9, 2)])
    def test_two_point(self, p, q, k):
        assert srev(DiscreteDistribution.two_point(p, q), k) == pytest.approx(p * q * k)

    def test_uniform_pair(self):
        assert srev(DiscreteDistribution([1, 2], [0.5, 0.5]), 3) == pytest.approx(3.0)

    def test_bad_k(self):
        with pytest.raises(DomainError):
            srev(THREE_POINT, 0)


class TestBrev:
    @pytest.mark.parametrize("dist", [THREE_POINT, DiscreteDistribution.two_point(2.0, 0.1)])
    def test_single_item(self, dist):
        r = brev(dist, 1)
        assert r.brev == pytest.approx(r.srev) and r.ratio == pytest.approx(1.0)

    def test_two_items_at_binding_point(self):
        dist = DiscreteDistribution.two_point(1.0, 2 / 3)
        r = brev(dist, 2)
        # Prices 1 and 2 both earn 8/9 here; the lower one is reported.
        assert brev_at_price(dist, 2, 2).revenue == pytest.approx(8 / 9, abs=1e-12)
        assert brev_at_price(dist, 2, 1).revenue == pytest.approx(8 / 9, abs=1e-12)
        assert r.bundle_price == 1.0
        assert r.brev == pytest.approx(8 / 9, abs=1e-12)
        assert r.ratio == pytest.approx(2 / 3, abs=1e-12)

    def test_three_point_enumeration(self):
        r = brev(THREE_POINT, 2)
        rev, price = best_bundle_price([0, 1, 2], [0.5, 0.3, 0.2], 2)
        assert r.brev == pytest.approx(rev, abs=1e-12) and r.bundle_price == price
        # Frozen from exact fractions: price 2 sells w.p. 9/20.
        assert r.brev == pytest.approx(0.9, abs=1e-12)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            brev(THREE_POINT, 600, cap=1000)

    def test_ratio_field(self):
        r = brev(THREE_POINT, 3)
        assert r.ratio == pytest.approx(r.brev / r.srev, abs=1e-12)
        assert r.ratio > 0

    @settings(max_examples=150, deadline=None)
    @given(
        values=st.lists(st.integers(0, 20), min_size=1, max_size=4, unique=True),
        weights=st.lists(st.floats(0.01, 1), min_size=4, max_size=4),
        k=st.integers(1, 6),
    )
    def test_equals_enumeration(self, values, weights, k):
        support = sorted(v / 2 for v in values)
        if support[-1] == 0:
            return
        w = np.array(weights[: len(support)])
        probs = (w / w.sum()).tolist()
        r = brev(DiscreteDistribution(support, probs), k)
        rev, _ = best_bundle_price(support, probs, k)
        assert r.brev == pytest.approx(rev, abs=1e-9)

    def test_dominates_fixed_prices(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            dist = random_dist(rng, 4)
            k = int(rng.integers(1, 6))
            best = brev(dist, k).brev
            for price in rng.uniform(0, 10 * k, size=20):
                assert brev_at_price(dist, k, float(price)).revenue <= best + 1e-12

    @pytest.mark.parametrize("s", [0.5, 3.0])
    def test_scale_covariance(self, s):
        rng = np.random.default_rng(5)
        for _ in range(40):
            dist = random_dist(rng, 4)
            k = int(rng.integers(1, 6))
            a, b = brev(dist, k), brev(dist.scaled(s), k)
            assert b.srev == pytest.approx(s * a.srev, rel=1e-12)
            assert b.brev == pytest.approx(s * a.brev, rel=1e-12)
            assert b.bundle_price == pytest.approx(s * a.bundle_price, rel=1e-12)
            assert b.ratio == pytest.approx(a.ratio, rel=1e-12)
            qa, qb = myerson_price(dist), myerson_price(dist.scaled(s))
            assert qb.revenue == pytest.approx(s * qa.revenue, rel=1e-12)
            assert qb.price == pytest.approx(s * qa.price, rel=1e-12)

    def test_two_point_dominance(self):
        rng = np.random.default_rng(2024)
        for t in range(1000):
            f = random_dist(rng, 5)
            k = 1 + t % 6
            quote = myerson_price(f)
            g = DiscreteDistribution.two_point(quote.price, quote.sale_probability)
            assert brev(f, k).ratio >= brev(g, k).ratio - 1e-9


class TestBrevAtPrice:
    def test_point_mass(self):
        q = brev_at_price(DiscreteDistribution.point_mass(1.0), 5, 5)
        assert q.revenue == pytest.approx(5.0) and q.sale_probability == pytest.approx(1.0)

    @pytest.mark.parametrize("c,k,d", [(2.655, 6, 2), (2.655, 6, 3), (7.0, 12, 5)])
    def test_bernoulli_tail(self, c, k, d):
        q = brev_at_price(BernoulliFamily(c, k).distribution(), k, d)
        assert q.revenue == pytest.approx(d * (1 - binomial_cdf(d - 1, k, c / k)), abs=1e-12)

    def test_fair_coins(self):
        # P(Bin(4, 1/2) >= 3) = 5/16.
        q = brev_at_price(DiscreteDistribution.two_point(1.0, 0.5), 4, 3)
        assert q.revenue == pytest.approx(0.9375, abs=1e-15)

    def test_negative_price(self):
        with pytest.raises(DomainError):
            brev_at_price(THREE_POINT, 2, -1.0)

    def test_quote_helper(self):
        assert RevenueQuote.at(2.0, 0.25).revenue == 0.5
