import math

import numpy as np
import pytest

from bundlerev import analysis
from bundlerev.analysis import (
    Segment,
    build_table,
    bundle_ratio,
    constants,
    figure_data,
    ratio_slope,
    segment_boundary,
    segment_minimum,
    segment_shape,
)
from bundlerev.distcore import h
from bundlerev.errors import BracketingError, DomainError, StructureError

# Roots of d*h_d = (d+1)*h_{d+1} from mpmath.findroot at 40 digits.
MP_BOUNDARY = {
    1: 1.2564312086261697,
    2: 2.6556746947655825,
    3: 4.0571390893206929,
    8: 10.797904413168250,
    20: 25.897046433325991,
}
MP_R_STAR = 0.55969479017987400


@pytest.mark.parametrize("d,expected", sorted(MP_BOUNDARY.items()))
def test_boundary_matches_mpmath(d, expected):
    assert segment_boundary(d) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("d,printed", [(1, 1.256), (2, 2.655), (3, 4.057)])
def test_boundary_printed_values(d, printed):
    assert segment_boundary(d) == pytest.approx(printed, abs=1e-3)


def test_boundaries_increase():
    values = [segment_boundary(d) for d in range(1, 27)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_boundary_domain_and_bracketing(monkeypatch):
    with pytest.raises(DomainError):
        segment_boundary(0)
    monkeypatch.setattr(analysis, "_junction_gap", lambda d, x: 1.0)
    with pytest.raises(BracketingError):
        analysis.segment_boundary.__wrapped__(5)


class TestConstants:
    def test_values(self):
        cert = constants()
        assert cert.c_star == pytest.approx(2.655, abs=1e-3)
        assert cert.r_star == pytest.approx(0.559, abs=1e-3)
        assert cert.r_star == pytest.approx(MP_R_STAR, abs=1e-12)
        assert cert.residual < 1e-10

    def test_defining_equation(self):
        c = constants().c_star
        assert 2 * h(2, c) == pytest.approx(3 * h(3, c), abs=1e-9)
        assert constants().r_star == pytest.approx(2 * h(2, c) / c, abs=1e-12)

    def test_not_the_0599_literal(self):
        assert abs(constants().r_star - 0.599) > 0.03


@pytest.fixture(scope="module")
def table():
    return build_table(40)


class TestTable:
    def test_row_count(self, table):
        assert [s.d for s in table] == list(range(1, 24))

    def test_row_two(self, table):
        s = table[1]
        assert (s.ratio_low, s.ratio_high) == (pytest.approx(0.569, abs=1e-3), pytest.approx(0.5597, abs=1e-4))

    def test_row_eight(self, table):
        s = table[7]
        assert s.c_low == pytest.approx(9.482, abs=1e-3)
        assert s.c_high == pytest.approx(10.79, abs=1e-2)
        assert s.ratio_low == pytest.approx(0.615, abs=1e-3)
        assert s.ratio_high == pytest.approx(0.624, abs=1e-3)

    def test_adjacent_rows_share_endpoints(self, table):
        assert table[0].c_low == 0.0
        for a, b in zip(table, table[1:]):
            assert a.c_high == b.c_low
        assert table[-1].c_high == 40.0

    def test_endpoint_ratios_consistent(self, table):
        for s in table:
            if s.c_low > 0:
                assert s.ratio_low == pytest.approx(s.d * h(s.d, s.c_low) / s.c_low, abs=1e-9)
            assert s.ratio_high == pytest.approx(s.d * h(s.d, s.c_high) / s.c_high, abs=1e-9)

    def test_every_row_clears_r_star(self, table):
        r_star = constants().r_star
        assert min(segment_minimum(s) for s in table) == pytest.approx(r_star, abs=1e-6)
        assert all(segment_minimum(s) >= r_star - 1e-12 for s in table)

    def test_truncation(self):
        rows = build_table(2.7)
        assert [s.d for s in rows] == [1, 2, 3]
        assert rows[-1].c_high == 2.7

    def test_without_extension_rows_follow_junctions(self):
        rows = build_table(40, extend=False)
        # Junction 31 sits near 39.12, so price 32 covers the cut-off tail.
        assert len(rows) == 32 and rows[-1].c_high == 40.0

    def test_bad_cmax(self):
        with pytest.raises(DomainError):
            build_table(0.5)


class TestSegmentMinimum:
    def test_d2(self):
        seg = build_table(40)[1]
        assert segment_minimum(seg) == pytest.approx(0.559, abs=1e-3)
        assert segment_minimum(seg) == seg.ratio_high

    def test_d1(self):
        seg = build_table(40)[0]
        assert segment_minimum(seg) == pytest.approx(0.569, abs=1e-3)
        assert seg.ratio_low == 1.0

    def test_d5(self):
        seg = build_table(40)[4]
        assert segment_minimum(seg) == pytest.approx(0.581, abs=1e-3)

    def test_structure_violation(self, monkeypatch):
        monkeypatch.setattr(analysis, "bundle_ratio", lambda d, c: math.cos(3 * c))
        seg = Segment(3, 0.5, 6.0, math.cos(1.5), math.cos(18.0))
        with pytest.raises(StructureError):
            segment_minimum(seg)

    def test_interior_minimum_rejected(self, monkeypatch):
        monkeypatch.setattr(analysis, "bundle_ratio", lambda d, c: (c - 2) ** 2)
        with pytest.raises(StructureError):
            segment_minimum(Segment(2, 1.0, 3.0, 1.0, 1.0))

    def test_shape_reports_interior_maximum(self):
        shape = segment_shape(build_table(40)[22])
        assert shape.sign_changes == 1 and 28.3 < shape.interior_max_at < 40


class TestFigure:
    def test_small_c_limit(self):
        (c, d, r), = figure_data(1, [1e-8])
        assert r == pytest.approx(1.0, abs=1e-7)

    def test_junction_c_star(self):
        rows = {d: r for _, d, r in figure_data(8, [constants().c_star])}
        assert len(rows) == 8
        assert rows[2] == pytest.approx(rows[3], abs=1e-9)
        assert rows[2] == pytest.approx(0.559, abs=1e-3)

    def test_junction_three_four(self):
        rows = {d: r for _, d, r in figure_data(8, [segment_boundary(3)])}
        assert rows[3] == pytest.approx(rows[4], abs=1e-6)

    def test_shape_and_domain(self):
        rows = figure_data(3, [0.5, 1.0])
        assert [(c, d) for c, d, _ in rows] == [(0.5, 1), (0.5, 2), (0.5, 3), (1.0, 1), (1.0, 2), (1.0, 3)]
        with pytest.raises(DomainError):
            figure_data(3, [0.0])
        with pytest.raises(DomainError):
            figure_data(0, [1.0])


def expanded_slope(d, x):
    # Same derivative written as e^{-x}p/x^2 + e^{-x}p/x - 1/x^2 - e^{-x}p'/x.
    p = sum(x ** i / math.factorial(i) for i in range(d))
    dp = sum(x ** (i - 1) / math.factorial(i - 1) for i in range(1, d))
    e = math.exp(-x)
    return d * (e * p / x ** 2 + e * p / x - 1 / x ** 2 - e * dp / x)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 15, 23])
def test_slope_closed_form(d):
    for x in np.linspace(0.3, 40, 60):
        eps = 1e-6
        central = (bundle_ratio(d, x + eps) - bundle_ratio(d, x - eps)) / (2 * eps)
        assert ratio_slope(d, x) == pytest.approx(central, abs=1e-6)
        if x > 1:
            assert ratio_slope(d, x) == pytest.approx(expanded_slope(d, x), abs=1e-9)


def test_high_price_bound_at_c_star():
    c = constants().c_star
    for d in range(8, 31):
        assert d * c ** d / math.factorial(d) < 1.3


def test_bundle_ratio_at_zero():
    assert bundle_ratio(1, 0.0) == 1.0
    assert bundle_ratio(4, 0.0) == 0.0
    with pytest.raises(DomainError):
        bundle_ratio(1, -1.0)
