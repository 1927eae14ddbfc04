"""Poisson-limit ratio curves d * h_d(c) / c and the pricing table built on them.

For the {0,1} family with mean c, posting bundle price d earns about
d * h_d(c), while selling separately earns c. Each integer price d is the
best choice on an interval of c whose ends solve
d * h_d(c) = (d + 1) * h_{d+1}(c). The worst ratio over all intervals sits
at the 2/3 junction and defines the constants c_star and r_star.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from .distcore import h
from .errors import BracketingError, DomainError, StructureError

BISECT_XTOL = 1e-12
SCAN_STEP = 1e-3


@dataclass(frozen=True)
class Segment:
    """One pricing-table row: price ``d`` is used for c in [c_low, c_high]."""

    d: int
    c_low: float
    c_high: float
    ratio_low: float
    ratio_high: float

    def __post_init__(self):
        if not self.c_low < self.c_high:
            raise DomainError(f"empty segment [{self.c_low}, {self.c_high}]")


@dataclass(frozen=True)
class ConstantsCertificate:
    c_star: float
    r_star: float
    residual: float


@dataclass(frozen=True)
class SegmentShape:
    """Outcome of scanning a segment for extrema."""

    sign_changes: int
    interior_max_at: Optional[float]
    grid_min: float
    endpoint_min: float


def bundle_ratio(d: int, c: float) -> float:
    """d * h_d(c) / c, extended continuously to c = 0."""
    if c < 0:
        raise DomainError("c must be >= 0")
    if c == 0:
        return 1.0 if d == 1 else 0.0
    return d * h(d, c) / c


def ratio_slope(d: int, x: float) -> float:
    """Closed-form derivative of d * h_d(x) / x for x > 0.

    Uses h_d'(x) = e^{-x} x^{d-1} / (d-1)!, so the derivative is
    d * (e^{-x} x^{d-2} / (d-1)! - h_d(x) / x^2).
    """
    if x <= 0:
        raise DomainError("x must be positive")
    log_pmf = -x + (d - 1) * math.log(x) - math.lgamma(d)
    return d * (math.exp(log_pmf) / x - h(d, x) / (x * x))


def _junction_gap(d: int, x: float) -> float:
    return d * h(d, x) - (d + 1) * h(d + 1, x)


@lru_cache(maxsize=None)
def segment_boundary(d: int) -> float:
    """The c > 0 where prices d and d + 1 earn the same Poisson-limit revenue."""
    if int(d) != d or d < 1:
        raise DomainError(f"d must be an integer >= 1, got {d!r}")
    lo, hi = d / 2.0, 2.0 * (d + 1)
    f_lo, f_hi = _junction_gap(d, lo), _junction_gap(d, hi)
    if not (f_lo > 0 > f_hi):
        raise BracketingError(
            f"no sign change for d={d} on [{lo}, {hi}]: f={f_lo!r}, {f_hi!r}"
        )
    return bisect(lambda x: _junction_gap(d, x), lo, hi, xtol=BISECT_XTOL, maxiter=200)


@lru_cache(maxsize=1)
def constants() -> ConstantsCertificate:
    c_star = segment_boundary(2)
    r_star = 2.0 * h(2, c_star) / c_star
    residual = abs(2.0 * h(2, c_star) - 3.0 * h(3, c_star))
    return ConstantsCertificate(c_star=c_star, r_star=r_star, residual=residual)


def _segment(d: int, lo: float, hi: float) -> Segment:
    return Segment(d, lo, hi, bundle_ratio(d, lo), bundle_ratio(d, hi))


def build_table(
    c_max: float, floor: Optional[float] = None, extend: bool = True
) -> List[Segment]:
    """Consecutive segments for d = 1, 2, ... covering (0, c_max].

    Each row runs between consecutive junctions. With ``extend`` on, the
    table closes at the first price d whose ratio is still at least
    ``floor`` (default r_star) at c_max: that row runs from its left
    junction all the way to c_max. Otherwise the last row is simply cut at
    c_max. For c_max = 40 the rule closes at d = 23.
    """
    if not c_max > 1:
        raise DomainError("c_max must exceed 1")
    if floor is None:
        floor = constants().r_star
    rows = []
    lo, d = 0.0, 1
    while True:
        hi = segment_boundary(d)
        if hi >= c_max or (extend and bundle_ratio(d, c_max) >= floor):
            rows.append(_segment(d, lo, c_max))
            return rows
        rows.append(_segment(d, lo, hi))
        lo, d = hi, d + 1


def segment_shape(seg: Segment, step: float = SCAN_STEP) -> SegmentShape:
    """Dense scan of d * h_d(c) / c across a segment.

    Counts sign changes of forward differences. A single + to - change is
    an interior maximum; anything else with a change is reported as-is.
    """
    n = max(2, int(math.ceil((seg.c_high - seg.c_low) / step)) + 1)
    grid = np.linspace(seg.c_low, seg.c_high, n)
    values = np.array([bundle_ratio(seg.d, c) for c in grid])
    signs = np.sign(np.diff(values))
    signs = signs[signs != 0]
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    interior_max = None
    if flips.size == 1 and signs[0] > 0:
        interior_max = float(grid[int(np.argmax(values))])
    return SegmentShape(
        sign_changes=int(flips.size),
        interior_max_at=interior_max,
        grid_min=float(values.min()),
        endpoint_min=min(seg.ratio_low, seg.ratio_high),
    )


def segment_minimum(seg: Segment, step: float = SCAN_STEP) -> float:
    """Minimum of d * h_d(c) / c over the segment.

    Valid only when the curve has at most one extremum there and it is a
    maximum; then the minimum is at an endpoint. Otherwise raises
    StructureError.
    """
    shape = segment_shape(seg, step)
    if shape.sign_changes > 1:
        raise StructureError(
            f"d={seg.d}: {shape.sign_changes} slope sign changes on "
            f"[{seg.c_low}, {seg.c_high}]"
        )
    if shape.sign_changes == 1 and shape.interior_max_at is None:
        raise StructureError(f"d={seg.d}: interior extremum is a minimum")
    if shape.grid_min < shape.endpoint_min - 1e-12:
        raise StructureError(f"d={seg.d}: grid dips below both endpoints")
    return shape.endpoint_min


def figure_data(d_max: int, c_grid: Iterable[float]) -> List[Tuple[float, int, float]]:
    """Rows (c, d, d * h_d(c) / c) for every grid c and d = 1..d_max, c-major."""
    if d_max < 1:
        raise DomainError("d_max must be >= 1")
    rows = []
    for c in c_grid:
        if not c > 0:
            raise DomainError(f"grid values must be positive, got {c!r}")
        for d in range(1, d_max + 1):
            rows.append((float(c), d, bundle_ratio(d, c)))
    return rows
