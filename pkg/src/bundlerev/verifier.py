"""Numerical re-checks of every step behind the 55.9% bundling bound.

Each check returns a CheckResult whose ``margin`` is the distance to the
failing side of the inequality it tests (positive means pass). Grid steps
are chosen so that the checked functions, whose slopes stay below about 1
on the ranges used, cannot cross their floors between grid points by more
than the reported tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .analysis import build_table, constants
from .distcore import (
    DEFAULT_CAP,
    BernoulliFamily,
    DiscreteDistribution,
    binomial_cdf,
    binomial_cdf_table,
    h,
    poisson_cdf_table,
)
from .errors import DomainError
from .revenue import brev, brev_at_price, myerson_price

#: Order in which checks are reported, whatever order they ran in.
CHECK_ORDER = ("chernoff", "k2", "k3", "anderson", "lower", "witness", "reduction")

LOWER_BOUND_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    margin: float
    details: str = ""
    data: Dict[str, object] = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.margin > 0)


@dataclass
class VerificationReport:
    checks: List[CheckResult]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)


def _combine(margins: Sequence[float], gates: Sequence[float] = ()) -> float:
    """Smallest substantive margin, unless an agreement gate (slack >= 0 passes) fails."""
    failed = [g for g in gates if g < 0]
    if failed:
        return min(failed)
    return min(margins)


def _grid(step: float, upper: float, lower_index: int = 1) -> np.ndarray:
    # Integer multiples of step, so the points are reproducible and hit round values.
    n = int(round(upper / step))
    return np.arange(lower_index, n + 1) * step


def bernoulli_ratio(c: float, k: int, cap: int = DEFAULT_CAP) -> float:
    """Exact BRev/SRev for k items valued in {0,1} with P(1) = c / k."""
    return brev(BernoulliFamily(c, k).distribution(), k, cap=cap).ratio


def check_chernoff_large_c(
    c_step: float = 0.25, c_hi: float = 200.0, k_factors: Sequence[int] = (1, 2, 10)
) -> CheckResult:
    """Large-mean case: a price between 0.625c and 0.65c sells w.p. > 0.9."""
    constant = 1.0 - (math.exp(-0.35) / 0.65 ** 0.65) ** 40
    margins = [constant - 0.9]
    worst_tail, worst_ratio, worst_at = 1.0, math.inf, None
    missing = []
    n_points = 0
    for c in 40.0 + np.arange(int(round((c_hi - 40.0) / c_step)) + 1) * c_step:
        d_lo, d_hi = math.ceil(0.625 * c), math.floor(0.65 * c)
        if d_lo > d_hi:
            missing.append(float(c))
            continue
        d = d_hi
        for factor in k_factors:
            k = factor * math.ceil(c)
            tail = 1.0 - binomial_cdf(d - 1, k, c / k)
            ratio = d * tail / c
            n_points += 1
            if tail < worst_tail:
                worst_tail = tail
            if ratio < worst_ratio:
                worst_ratio, worst_at = ratio, (float(c), k, d)
    margins += [worst_tail - 0.9, worst_ratio - 0.5625]
    if missing:
        margins.append(-1.0)
    # One convolution-based spot check keeps the binomial tail honest.
    spot = brev_at_price(BernoulliFamily(40.0, 400).distribution(), 400, 26).revenue / 40.0
    margins.append(spot - 0.5625)
    return CheckResult(
        "chernoff",
        min(margins),
        details=(
            f"constant={constant:.6f}; worst tail={worst_tail:.6f}; "
            f"worst ratio={worst_ratio:.6f} at (c,k,d)={worst_at}; "
            f"points={n_points}; c without a valid d: {len(missing)}"
        ),
        data={
            "constant": constant,
            "worst_tail": worst_tail,
            "worst_ratio": worst_ratio,
            "worst_at": worst_at,
            "spot_ratio_c40_k400": spot,
        },
    )


def k2_price1_ratio(c):
    return (2 * (c / 2) - (c / 2) ** 2) / c


def k2_price2_ratio(c):
    return 2 * (c / 2) ** 2 / c


def check_k2(step: float = 1e-4, tol: float = 1e-12) -> CheckResult:
    """Two items: price 1 up to c = 4/3, price 2 above, ratio never below 2/3."""
    grid = np.union1d(_grid(step, 2.0), [4.0 / 3.0])
    ratios = np.where(grid <= 4.0 / 3.0, k2_price1_ratio(grid), k2_price2_ratio(grid))
    i = int(np.argmin(ratios))
    disagreement = 0.0
    exact = np.empty_like(grid)
    for j, c in enumerate(grid):
        dist = BernoulliFamily(float(c), 2).distribution()
        p1 = brev_at_price(dist, 2, 1).revenue / c
        p2 = brev_at_price(dist, 2, 2).revenue / c
        disagreement = max(
            disagreement, abs(p1 - k2_price1_ratio(c)), abs(p2 - k2_price2_ratio(c))
        )
        exact[j] = max(p1, p2)
    e = int(np.argmin(exact))
    margin = _combine(
        [ratios[i] - (2.0 / 3.0 - tol), exact[e] - (2.0 / 3.0 - tol)],
        [1e-12 - disagreement],
    )
    return CheckResult(
        "k2",
        margin,
        details=(
            f"min case ratio={ratios[i]:.12f} at c={grid[i]:.6f}; "
            f"min exact ratio={exact[e]:.12f} at c={grid[e]:.6f}; "
            f"formula vs exact disagreement={disagreement:.2e}"
        ),
        data={
            "min_ratio": float(ratios[i]),
            "argmin_c": float(grid[i]),
            "min_exact_ratio": float(exact[e]),
            "argmin_exact_c": float(grid[e]),
            "disagreement": disagreement,
        },
    )


def k3_case_ratios(c):
    """Ratios of prices 1, 2, 3 for three {0,1} items with P(1) = c / 3."""
    q = c / 3
    p1 = (1 - (1 - q) ** 3) / c
    p2 = 2 * (1 - (1 - q) ** 3 - 3 * q * (1 - q) ** 2) / c
    p3 = 3 * q ** 3 / c
    return p1, p2, p3


def _crossing(f, lo, hi, iters=200):
    a, b = lo, hi
    fa = f(a)
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


K3_BREAKS = (1.325, 2.571)
K3_FLOORS = (0.623, 0.623, 0.734)


def check_k3(step: float = 1e-4, floor_tol: float = 5e-3) -> CheckResult:
    """Three items: printed case split, its floors, and an overall ratio above 0.6."""
    grid = _grid(step, 3.0)
    p1, p2, p3 = k3_case_ratios(grid)
    b1, b2 = K3_BREAKS
    cases = [(grid <= b1, p1), ((grid > b1) & (grid <= b2), p2), (grid > b2, p3)]
    case_mins = [float(vals[mask].min()) for mask, vals in cases]
    envelope = np.maximum(np.maximum(p1, p2), p3)
    printed = np.select([m for m, _ in cases], [v for _, v in cases])
    true_12 = _crossing(lambda c: k3_case_ratios(c)[0] - k3_case_ratios(c)[1], 0.5, 2.0)
    true_23 = _crossing(lambda c: k3_case_ratios(c)[1] - k3_case_ratios(c)[2], 2.0, 2.99)

    # Floors must hold past the printed split too, up to the true crossing.
    left = _grid(step / 10, max(b1, true_12) + 0.01)
    left = left[left >= min(b1, true_12) - 0.01]
    right = _grid(step / 10, max(b2, true_23) + 0.01)
    right = right[right >= min(b2, true_23) - 0.01]
    near_1 = float(np.max(k3_case_ratios(left)[:2], axis=0).min())
    near_2 = float(np.max(k3_case_ratios(right)[1:], axis=0).min())

    exact = np.array([bernoulli_ratio(float(c), 3) for c in grid[::10]])
    spot_c = 2.0
    spot = brev_at_price(BernoulliFamily(spot_c, 3).distribution(), 3, 2).revenue / spot_c
    spot_err = abs(spot - k3_case_ratios(spot_c)[1])

    margins = [m - f for m, f in zip(case_mins, K3_FLOORS)]
    margins += [float(printed.min()) - 0.6, float(exact.min()) - 0.6]
    margins += [near_1 - K3_FLOORS[0], near_2 - K3_FLOORS[1]]
    gates = [floor_tol - abs(m - f) for m, f in zip(case_mins, K3_FLOORS)]
    gates.append(1e-12 - spot_err)
    return CheckResult(
        "k3",
        _combine(margins, gates),
        details=(
            f"case minima={[round(m, 6) for m in case_mins]} vs floors {K3_FLOORS}; "
            f"printed splits {K3_BREAKS}, true crossings ({true_12:.6f}, {true_23:.6f}); "
            f"min printed-case ratio={printed.min():.6f}; "
            f"min envelope={envelope.min():.6f}; min exact={exact.min():.6f}"
        ),
        data={
            "case_minima": case_mins,
            "true_crossings": [true_12, true_23],
            "printed_breaks": list(K3_BREAKS),
            "min_printed_ratio": float(printed.min()),
            "min_envelope_ratio": float(envelope.min()),
            "min_exact_ratio": float(exact.min()),
        },
    )


def check_anderson_samuels(
    k_max: int = 50, c_max: float = 40.0, step: float = 0.01
) -> CheckResult:
    """Poisson CDF strictly above the matching binomial CDF for m <= c(1 - 1/(k+1)).

    The complementary form, h_d(c) <= 1 - B(d - 1; k, c/k) for
    d <= c(1 - 1/(k+1)) + 1, is checked on the same grid.
    """
    if k_max < 2 or c_max <= 0:
        raise DomainError("need k_max >= 2 and c_max > 0")
    violations = 0
    n_points = 0
    worst = math.inf
    worst_at = None
    for k in range(1, k_max + 1):
        cs = _grid(step, min(c_max, float(k)))
        if cs.size == 0:
            continue
        limit = cs * (1.0 - 1.0 / (k + 1)) + 1e-12
        m_top = int(math.floor(limit.max()))
        pois = poisson_cdf_table(m_top, cs)
        binom = binomial_cdf_table(m_top, k, np.minimum(cs / k, 1.0))
        ms = np.arange(m_top + 1)
        inside = ms[None, :] <= limit[:, None]
        diff = np.where(inside, pois - binom, np.inf)
        n_points += int(inside.sum())
        bad = inside & (diff <= 0)
        violations += int(bad.sum())
        j = np.unravel_index(np.argmin(diff), diff.shape)
        # Relative gap, since both CDFs can be tiny for small m.
        rel = diff[j] / max(pois[j], 1e-300)
        if np.isfinite(rel) and rel < worst:
            worst, worst_at = float(rel), (k, float(cs[j[0]]), int(ms[j[1]]))
    # Tail form via h, which sums the Poisson tail directly.
    tail_violations = 0
    for k in (2, 4, 10, 50):
        if k > k_max:
            continue
        for c in _grid(0.1, min(c_max, float(k))):
            d_top = int(math.floor(c * (1.0 - 1.0 / (k + 1)) + 1 + 1e-12))
            for d in range(1, d_top + 1):
                if h(d, c) > 1.0 - binomial_cdf(d - 1, k, c / k):
                    tail_violations += 1
    margin = worst if violations == 0 and tail_violations == 0 else -float(
        violations + tail_violations
    )
    return CheckResult(
        "anderson",
        margin,
        details=(
            f"{n_points} (k,c,m) points, {violations} CDF violations, "
            f"{tail_violations} tail-form violations; smallest relative gap "
            f"{worst:.3e} at (k,c,m)={worst_at}"
        ),
        data={
            "points": n_points,
            "violations": violations,
            "tail_violations": tail_violations,
            "min_relative_gap": worst,
            "min_at": worst_at,
        },
    )


SMALL_K_FLOORS = {1: 1.0, 2: 2.0 / 3.0, 3: 0.6}


def ratio_floor(k: int) -> float:
    return SMALL_K_FLOORS.get(k, constants().r_star)


def bernoulli_sweep(k: int, c_max: float = 40.0, step: float = 1e-3,
                    cap: int = DEFAULT_CAP) -> Tuple[np.ndarray, np.ndarray]:
    """Exact ratios on the grid c = step, 2*step, ..., min(c_max, k)."""
    cs = _grid(step, min(c_max, float(k)))
    return cs, np.array([bernoulli_ratio(float(c), k, cap) for c in cs])


def table_precondition_margin(k: int, c_max: float = 40.0) -> float:
    """Smallest slack in d <= c(1 - 1/(k+1)) + 1 over the table rows, at each row's left end."""
    slack = math.inf
    for seg in build_table(c_max):
        slack = min(slack, seg.c_low * (1.0 - 1.0 / (k + 1)) + 1.0 - seg.d)
    return slack


def check_lower_bound_bernoulli(
    k_list: Iterable[int] = (2, 3, 4, 5, 6, 8, 10, 12),
    c_max: float = 40.0,
    step: float = 1e-3,
    tol: float = LOWER_BOUND_TOL,
    cap: int = DEFAULT_CAP,
) -> CheckResult:
    """Exact Bernoulli ratios against r_star (k >= 4), 0.6 (k = 3), 2/3 (k = 2)."""
    r_star = constants().r_star
    margins = []
    per_k = {}
    global_min, global_at = math.inf, None
    for k in k_list:
        if k < 2:
            raise DomainError("k values must be >= 2")
        cs, ratios = bernoulli_sweep(k, c_max, step, cap)
        i = int(np.argmin(ratios))
        per_k[k] = {"min_ratio": float(ratios[i]), "argmin_c": float(cs[i])}
        floor = ratio_floor(k)
        margins.append(float(ratios[i]) - (floor - tol))
        if k >= 4 and ratios[i] < global_min:
            global_min, global_at = float(ratios[i]), (k, float(cs[i]))
    pre = {k: table_precondition_margin(k) for k in k_list if k >= 4}
    return CheckResult(
        "lower",
        _combine(margins, list(pre.values())),
        details=(
            f"r_star={r_star:.9f}; per-k minima "
            + ", ".join(f"k={k}: {v['min_ratio']:.6f}@{v['argmin_c']:.3f}" for k, v in per_k.items())
            + f"; table precondition slack (k>=4) min={min(pre.values()) if pre else None}"
        ),
        data={
            "r_star": r_star,
            "per_k": per_k,
            "global_min_k_ge_4": global_min,
            "global_argmin": global_at,
            "precondition_slack": pre,
        },
    )


def poisson_term_bound(d: int, c: float) -> float:
    """d * c^d / d!, the crude revenue bound for high bundle prices."""
    log_val = math.log(d) + d * math.log(c) - math.lgamma(d + 1)
    return math.exp(log_val)


def build_tight_witness(
    epsilon: float = 0.05, k_limit: int = 2 ** 14, cap: int = DEFAULT_CAP
) -> Tuple[int, BernoulliFamily, CheckResult]:
    """Smallest k in 4, 8, 16, ... whose Bernoulli(c_star / k) ratio is below r_star + epsilon."""
    if not 0 < epsilon < 0.2:
        raise DomainError("epsilon must lie in (0, 0.2)")
    cert = constants()
    c_star, r_star = cert.c_star, cert.r_star
    k = 4
    tried = {}
    while True:
        ratio = bernoulli_ratio(c_star, k, cap)
        tried[k] = ratio
        if ratio < r_star + epsilon or k >= k_limit:
            break
        k *= 2
    family = BernoulliFamily(c_star, k)
    # Same ratio straight from binomial tails over every bundle price d <= k.
    tails = 1.0 - binomial_cdf_table(k, k, family.q)
    direct = max(d * tails[d - 1] for d in range(1, k + 1)) / c_star

    mid = [d * h(d, c_star) for d in range(4, 8)]
    high = [poisson_term_bound(d, c_star) for d in range(8, 31)]
    two = 2.0 * h(2, c_star)
    margins = [
        r_star + epsilon - ratio,
        ratio - (r_star - LOWER_BOUND_TOL),
        1.48 - max(mid),
        1.3 - max(high),
        two - max(mid),
    ]
    check = CheckResult(
        "witness",
        _combine(margins, [1e-9 - abs(direct - ratio)]),
        details=(
            f"k={k}, c_star={c_star:.9f}, ratio={ratio:.9f} "
            f"(target < {r_star + epsilon:.9f}); 2h_2(c*)={two:.6f}; "
            f"max d*h_d(c*) for d=4..7: {max(mid):.6f}; "
            f"max d*c*^d/d! for d=8..30: {max(high):.6f}"
        ),
        data={
            "k": k,
            "ratio": ratio,
            "direct_ratio": direct,
            "epsilon": epsilon,
            "ratios_tried": tried,
            "two_h2": two,
            "mid_revenues": mid,
            "high_bounds_max": max(high),
        },
    )
    return k, family, check


VALUE_GRID = np.linspace(0.0, 10.0, 21)


def random_distribution(rng: np.random.Generator, max_support: int = 5) -> DiscreteDistribution:
    """Support drawn without replacement from a 0.5-spaced grid on [0, 10],
    masses from normalised uniform draws. Redraws until some mass is above 0.
    """
    while True:
        size = int(rng.integers(1, max_support + 1))
        support = np.sort(rng.choice(VALUE_GRID, size=size, replace=False))
        weights = rng.uniform(0.0, 1.0, size=size)
        if support[-1] > 0 and weights.sum() > 0:
            return DiscreteDistribution(support, weights / weights.sum())


def check_reduction(
    trials: int = 200, seed: int = 0, k_values: Sequence[int] = (2, 3, 4, 5),
    tol: float = LOWER_BOUND_TOL,
) -> CheckResult:
    """Replacing F by its two-point Myerson surrogate can only lower the ratio."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst = math.inf
    worst_info = None
    srev_err = scale_err = 0.0
    for t in range(trials):
        f = random_distribution(rng)
        quote = myerson_price(f)
        p, q = quote.price, quote.sale_probability
        g = DiscreteDistribution.two_point(p, q)
        h_dist = DiscreteDistribution.two_point(1.0, q)
        for k in k_values:
            rf, rg, rh = brev(f, k), brev(g, k), brev(h_dist, k)
            srev_err = max(srev_err, abs(rg.srev - rf.srev), abs(rg.srev - p * q * k))
            scale_err = max(
                scale_err, abs(rg.brev - p * rh.brev), abs(rg.srev - p * rh.srev)
            )
            gap = rf.ratio - rg.ratio
            if gap < worst:
                worst, worst_info = gap, (t, k)
    return CheckResult(
        "reduction",
        _combine([worst + tol], [tol - srev_err, tol - scale_err]),
        details=(
            f"{trials} trials x k in {list(k_values)}; "
            f"min ratio(F)-ratio(G)={worst:.3e} at (trial,k)={worst_info}; "
            f"max SRev mismatch={srev_err:.2e}; max scaling mismatch={scale_err:.2e}"
        ),
        data={
            "min_gap": worst,
            "min_gap_at": worst_info,
            "srev_mismatch": srev_err,
            "scale_mismatch": scale_err,
            "seed": seed,
            "trials": trials,
        },
    )


def run_suite(
    names: Optional[Iterable[str]] = None,
    seed: int = 42,
    trials: int = 200,
    step: float = 1e-3,
    tol: float = LOWER_BOUND_TOL,
    cap: int = DEFAULT_CAP,
    epsilon: float = 0.05,
) -> VerificationReport:
    """Run the named checks (all by default) and report them in CHECK_ORDER."""
    wanted = set(CHECK_ORDER if names is None else names)
    unknown = wanted - set(CHECK_ORDER)
    if unknown:
        raise DomainError(f"unknown checks: {sorted(unknown)}")
    runners = {
        "chernoff": lambda: check_chernoff_large_c(),
        "k2": lambda: check_k2(),
        "k3": lambda: check_k3(),
        "anderson": lambda: check_anderson_samuels(),
        "lower": lambda: check_lower_bound_bernoulli(step=step, tol=tol, cap=cap),
        "witness": lambda: build_tight_witness(epsilon, cap=cap)[2],
        "reduction": lambda: check_reduction(trials, seed, tol=tol),
    }
    return VerificationReport([runners[name]() for name in CHECK_ORDER if name in wanted])
