"""Finite discrete distributions plus the binomial/Poisson tail functions.

Everything here is a pure function of its inputs. The CDFs are built by
recursive term updates (ratio of consecutive terms) rather than factorial
tables, which keeps them finite for the ranges used in this package
(d <= 30, mean <= 200, k up to a few thousand).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, DomainError

#: Values closer than this are treated as one support point when merging.
MERGE_TOL = 1e-12
#: Slack used when asking for P(X >= p) on a float support.
TAIL_TOL = 1e-12
#: Default limit on the product support size of a single pairwise convolution.
DEFAULT_CAP = 2_000_000

# Past this mean the linear Poisson recursion risks overflow in the partial terms.
_POISSON_LINEAR_MAX = 600.0


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Law of a single non-negative valuation with finite support.

    ``support`` is strictly increasing and ``probs`` are the matching point
    masses. Zero-probability atoms are allowed and kept.
    """

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        support = np.ascontiguousarray(self.support, dtype=np.float64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if support.ndim != 1 or probs.ndim != 1:
            raise DomainError("support and probs must be one-dimensional")
        if support.size == 0:
            raise DomainError("support must be non-empty")
        if support.shape != probs.shape:
            raise DomainError(
                f"support has {support.size} values but probs has {probs.size}"
            )
        if not np.all(np.isfinite(support)) or np.any(support < 0):
            raise DomainError("support values must be finite and >= 0")
        if np.any(np.diff(support) <= 0):
            raise DomainError("support must be strictly increasing")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0) or np.any(probs > 1):
            raise DomainError("probs must lie in [0, 1]")
        total = math.fsum(probs)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"probs sum to {total!r}, not 1")
        support.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteDistribution":
        return cls([value], [1.0])

    @classmethod
    def two_point(cls, value: float, prob: float) -> "DiscreteDistribution":
        """Mass ``prob`` at ``value`` and the rest at 0."""
        if value <= 0:
            raise DomainError("two-point value must be positive")
        if not 0.0 <= prob <= 1.0:
            raise DomainError("prob must lie in [0, 1]")
        return cls([0.0, value], [1.0 - prob, prob])

    def __len__(self):
        return self.support.size

    def mean(self) -> float:
        return math.fsum(self.support * self.probs)

    def tail(self, price: float) -> float:
        """P(X >= price), with a TAIL_TOL slack on the threshold."""
        start = int(np.searchsorted(self.support, price - TAIL_TOL, side="left"))
        return min(1.0, math.fsum(self.probs[start:]))

    def tails(self) -> np.ndarray:
        """P(X >= v) for every support value v, as suffix sums of the masses."""
        return np.minimum(np.cumsum(self.probs[::-1])[::-1], 1.0)

    def scaled(self, factor: float) -> "DiscreteDistribution":
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        return DiscreteDistribution(self.support * factor, self.probs.copy())

    def to_dict(self) -> dict:
        return {"support": self.support.tolist(), "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteDistribution":
        return cls(data["support"], data["probs"])


@dataclass(frozen=True)
class BernoulliFamily:
    """Valuations in {0, 1} with P(1) = c / k, for k items."""

    c: float
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k!r}")
        if not 0.0 < self.c <= self.k:
            raise DomainError(f"need 0 < c <= k, got c={self.c!r}, k={self.k!r}")

    @property
    def q(self) -> float:
        return min(1.0, self.c / self.k)

    def distribution(self) -> DiscreteDistribution:
        return DiscreteDistribution([0.0, 1.0], [1.0 - self.q, self.q])


@dataclass(frozen=True)
class TailQuery:
    """A count threshold m, its price form d = m + 1, and a mean x."""

    m: Optional[int] = None
    d: Optional[int] = None
    x: Optional[float] = None

    def __post_init__(self):
        if self.m is not None and self.m < 0:
            raise DomainError("m must be >= 0")
        if self.d is not None and self.d < 1:
            raise DomainError("d must be >= 1")
        if self.x is not None and self.x < 0:
            raise DomainError("x must be >= 0")
        if self.m is not None and self.d is not None and self.d != self.m + 1:
            raise DomainError(f"d must equal m + 1 (m={self.m}, d={self.d})")


def _cumulative_from_logs(logs: np.ndarray) -> np.ndarray:
    # logs: (n, m+1) log-terms; returns running sums without overflow/underflow loss.
    peak = np.max(logs, axis=-1, keepdims=True)
    peak = np.where(np.isfinite(peak), peak, 0.0)
    sums = np.cumsum(np.exp(logs - peak), axis=-1) * np.exp(peak)
    return np.clip(sums, 0.0, 1.0)


def binomial_cdf_table(m_max: int, k: int, q) -> np.ndarray:
    """B(m; k, q) for m = 0..m_max, vectorised over ``q``.

    Returns an array of shape ``np.shape(q) + (m_max + 1,)``. Terms are
    advanced in log space by the ratio (k - i) / (i + 1) * q / (1 - q).
    """
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    if int(m_max) != m_max or not 0 <= m_max <= k:
        raise DomainError(f"need 0 <= m <= k, got m={m_max!r}, k={k!r}")
    q_arr = np.asarray(q, dtype=np.float64)
    if np.any(~np.isfinite(q_arr)) or np.any(q_arr < 0) or np.any(q_arr > 1):
        raise DomainError("q must lie in [0, 1]")
    flat = np.atleast_1d(q_arr).ravel()
    out = np.empty((flat.size, m_max + 1))
    full = flat == 1.0
    out[full] = (np.arange(m_max + 1) >= k).astype(float)
    rest = ~full
    if np.any(rest):
        qr = flat[rest][:, None]
        i = np.arange(m_max)
        with np.errstate(divide="ignore"):
            first = k * np.log1p(-qr)
            steps = np.log((k - i) / (i + 1.0)) + np.log(qr) - np.log1p(-qr)
        logs = np.concatenate([first, first + np.cumsum(steps, axis=1)], axis=1)
        out[rest] = _cumulative_from_logs(logs)
    return out.reshape(q_arr.shape + (m_max + 1,))


def poisson_cdf_table(m_max: int, x) -> np.ndarray:
    """P(m; x) for m = 0..m_max, vectorised over ``x``.

    Terms follow term_{i+1} = term_i * x / (i + 1). Means above a few hundred
    switch to the same recursion carried out in log space.
    """
    if int(m_max) != m_max or m_max < 0:
        raise DomainError(f"m must be a non-negative integer, got {m_max!r}")
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(x_arr)) or np.any(x_arr < 0):
        raise DomainError("Poisson mean must be finite and >= 0")
    flat = np.atleast_1d(x_arr).ravel()[:, None]
    i = np.arange(m_max)
    out = np.empty((flat.shape[0], m_max + 1))
    small = flat[:, 0] <= _POISSON_LINEAR_MAX
    if np.any(small):
        xs = flat[small]
        ratios = xs / (i + 1.0)
        terms = np.concatenate(
            [np.ones_like(xs), np.cumprod(ratios, axis=1)], axis=1
        ) * np.exp(-xs)
        out[small] = np.clip(np.cumsum(terms, axis=1), 0.0, 1.0)
    if np.any(~small):
        xl = flat[~small]
        steps = np.log(xl) - np.log(i + 1.0)
        logs = np.concatenate([-xl, -xl + np.cumsum(steps, axis=1)], axis=1)
        out[~small] = _cumulative_from_logs(logs)
    return out.reshape(x_arr.shape + (m_max + 1,))


def binomial_cdf(m: int, k: int, q: float) -> float:
    """P(Binomial(k, q) <= m)."""
    return float(binomial_cdf_table(m, k, q)[-1])


def poisson_cdf(m: int, x: float) -> float:
    """P(Poisson(x) <= m)."""
    return float(poisson_cdf_table(m, x)[-1])


def h(d: int, x: float) -> float:
    """Poisson tail P(Poisson(x) >= d), i.e. 1 - P(d - 1; x).

    Below the mean region (x < d) the tail is summed directly so tiny values
    keep full relative precision instead of cancelling against 1.
    """
    if int(d) != d or d < 1:
        raise DomainError(f"d must be an integer >= 1, got {d!r}")
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"x must be finite and >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if x >= d:
        return 1.0 - poisson_cdf(d - 1, x)
    log_term = -x
    for i in range(d):
        log_term += math.log(x) - math.log(i + 1)
    term = math.exp(log_term)
    parts = [term]
    i = d
    while term > 1e-18 * parts[0] and i < d + 2000:
        i += 1
        term *= x / i
        parts.append(term)
    return min(1.0, math.fsum(parts))


def _convolve_pair(a_vals, a_probs, b_vals, b_probs, cap):
    needed = a_vals.size * b_vals.size
    if needed > cap:
        raise CapacityError(needed, cap)
    vals = np.add.outer(a_vals, b_vals).ravel()
    probs = np.multiply.outer(a_probs, b_probs).ravel()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    probs = probs[order]
    starts = np.flatnonzero(np.concatenate([[True], np.diff(vals) > MERGE_TOL]))
    return vals[starts], np.add.reduceat(probs, starts)


def convolve_iid(
    dist: DiscreteDistribution, k: int, cap: int = DEFAULT_CAP
) -> DiscreteDistribution:
    """Exact law of the sum of ``k`` independent copies of ``dist``.

    Copies are folded in one at a time, so each step multiplies the current
    support by ``len(dist)`` and a two-point law stays at k + 1 points.
    Sums within MERGE_TOL of each other are merged into the smallest of them.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    vals, probs = dist.support, dist.probs
    for _ in range(int(k) - 1):
        vals, probs = _convolve_pair(vals, probs, dist.support, dist.probs, cap)
    return DiscreteDistribution(vals, probs)

