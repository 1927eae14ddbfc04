"""Posted-price revenues: single item (Rev), separate sale (SRev), bundle (BRev)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distcore import DEFAULT_CAP, DiscreteDistribution, convolve_iid
from .errors import DegenerateDistributionError, DomainError

# Revenues within this relative gap count as tied; the lowest price wins.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class RevenueQuote:
    price: float
    sale_probability: float
    revenue: float

    @classmethod
    def at(cls, price: float, sale_probability: float) -> "RevenueQuote":
        return cls(price, sale_probability, price * sale_probability)


@dataclass(frozen=True)
class RatioResult:
    srev: float
    brev: float
    ratio: float
    bundle_price: float
    bundle_sale_probability: float


def myerson_price(dist: DiscreteDistribution) -> RevenueQuote:
    """Best take-it-or-leave-it price for one item.

    Only support values are candidates: between two atoms the sale
    probability is flat, so moving the price up to the next atom never hurts.
    Near-ties resolve to the lowest price.
    """
    if not np.any((dist.support > 0) & (dist.probs > 0)):
        raise DegenerateDistributionError("all probability mass is at 0")
    tails = dist.tails()
    revenues = dist.support * tails
    best = revenues.max()
    idx = int(np.flatnonzero(revenues >= best * (1.0 - TIE_RTOL))[0])
    return RevenueQuote(float(dist.support[idx]), float(tails[idx]), float(revenues[idx]))


def srev(dist: DiscreteDistribution, k: int) -> float:
    """k times the single-item optimal revenue."""
    _check_k(k)
    return k * myerson_price(dist).revenue


def brev(dist: DiscreteDistribution, k: int, cap: int = DEFAULT_CAP) -> RatioResult:
    """Optimal bundle posted price for k i.i.d. items, alongside SRev."""
    _check_k(k)
    separate = srev(dist, k)
    quote = myerson_price(convolve_iid(dist, k, cap=cap))
    return RatioResult(
        srev=separate,
        brev=quote.revenue,
        ratio=quote.revenue / separate,
        bundle_price=quote.price,
        bundle_sale_probability=quote.sale_probability,
    )


def brev_at_price(
    dist: DiscreteDistribution, k: int, price: float, cap: int = DEFAULT_CAP
) -> RevenueQuote:
    """Revenue from one fixed bundle price."""
    _check_k(k)
    if price < 0:
        raise DomainError("price must be >= 0")
    total = convolve_iid(dist, k, cap=cap)
    return RevenueQuote.at(price, total.tail(price))


def _check_k(k):
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
