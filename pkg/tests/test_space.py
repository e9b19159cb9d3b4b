from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import EXAMPLE_SPACES, small_spaces
from covering_lab import (Ball, MetricError, PointSet, Space, ball, blossom, critical_radii,
                          from_points, grid_zd, lshape_net, measure, midpoint_defect,
                          ngon_chordal, parse_space_spec, build_space, radius_intervals,
                          three_point_delta, uncentered_blossom)
from covering_lab.space import exact_number


def test_exact_number_parses_decimals_exactly():
    assert exact_number("0.1") == Fraction(1, 10)
    assert exact_number("1/3") == Fraction(1, 3)
    assert exact_number(0.5) == Fraction(1, 2)
    assert exact_number(3) == 3


def test_open_ball_on_line(line5):
    # index i holds the integer i - 2
    assert ball(line5, Ball(2, 1)).indices() == [2]
    assert ball(line5, Ball(2, 2)).indices() == [1, 2, 3]
    assert ball(line5, Ball(2, 1, closed=True)).indices() == [1, 2, 3]
    assert measure(line5, ball(line5, Ball(0, 3))) == 3


def test_three_point_delta_measures(delta3):
    assert delta3.weights == (0, 0, 1)
    assert measure(delta3, ball(delta3, Ball(0, 2))) == 0
    assert measure(delta3, ball(delta3, Ball(1, Fraction(5, 2)))) == 1
    assert delta3.total_measure() == 1
    assert delta3.support().indices() == [2]


def test_critical_radii_grid():
    assert critical_radii(grid_zd(1, 2)) == (1, 2, 3, 4)
    assert critical_radii(three_point_delta()) == (1, 2, 3)


def test_radius_intervals_window():
    sp = grid_zd(1, 2)
    ivs = radius_intervals(sp, window=(Fraction(1, 2), 2))
    assert [(iv.lo, iv.hi) for iv in ivs] == [(Fraction(1, 2), 1), (1, 2)]
    assert all(iv.lo < iv.rep <= iv.hi for iv in ivs)
    ivs = radius_intervals(sp)
    assert ivs[-1].hi is None and ivs[-1].rep > 4


def test_metric_violation_names_triple():
    with pytest.raises(MetricError, match=r"0.*1.*2|triangle"):
        Space([[0, 1, 5], [1, 0, 1], [5, 1, 0]], [1, 1, 1])


@pytest.mark.parametrize("dist, weights", [
    ([[0, 1], [2, 0]], [1, 1]),        # asymmetric
    ([[1, 1], [1, 0]], [1, 1]),        # nonzero diagonal
    ([[0, 0], [0, 0]], [1, 1]),        # distinct points at distance 0
    ([[0, 1], [1, 0]], [1, -1]),       # negative weight
    ([[0, 1], [1, 0]], [1]),           # shape mismatch
])
def test_invalid_spaces_rejected(dist, weights):
    with pytest.raises((MetricError, ValueError)):
        Space(dist, weights)


def test_float_space_tolerates_rounding():
    sp = ngon_chordal(7)
    assert not sp.exact
    assert sp.n == 7
    # chordal distances on a circle of circumference 1 stay below the diameter 1/pi
    assert max(max(r) for r in sp.distance_matrix()) < 1 / np.pi + 1e-12


def test_from_points_l2_rational_is_exact():
    sp = from_points([(0, 0), (3, 4)], "l2", [1, 1])
    assert sp.exact and sp.dist(0, 1) == 5
    irr = from_points([(0, 0), (1, 1)], "l2", [1, 1])
    assert not irr.exact


def test_parse_space_spec_aliases():
    sp = build_space(parse_space_spec("grid:d=2,hw=1,ow=1/4"))
    assert sp.n == 9
    assert sp.weights[4] == Fraction(1, 4)
    assert sp.labels[4] == (0, 0)
    assert build_space(parse_space_spec("three-point-delta")).n == 3


def test_lshape_example_blossom_is_not_a_ball():
    net = lshape_net(Fraction(1, 12))
    x = net.index_of((1, 0))
    blu = uncentered_blossom(net, ball(net, Ball(x, 1)), Fraction(1, 6))
    D = net.distance_matrix()
    radii = sorted({v for row in D for v in row} | {Fraction(10**6)})
    for c in range(net.n):
        for r in radii:
            # open balls change only at distance levels; checking open and closed covers every radius
            assert set(blu) != oracles.ball(D, c, r)
            assert set(blu) != oracles.ball(D, c, r, closed=True)


def test_midpoint_defect():
    sp = grid_zd(1, 2)
    assert midpoint_defect(sp, 0, 4) == 0
    assert midpoint_defect(sp, 0, 1) == Fraction(1, 2)


@pytest.mark.parametrize("name", sorted(EXAMPLE_SPACES))
def test_blossom_matches_brute_force(name):
    sp = EXAMPLE_SPACES[name]()
    D = sp.distance_matrix()
    for x in range(sp.n):
        for r in (Fraction(1, 2), 1, Fraction(3, 2), 2):
            b = ball(sp, Ball(x, r))
            for s in (Fraction(1, 3), 1, 2):
                assert set(blossom(sp, b, s)) == oracles.blossom(D, set(b), s)
                assert set(uncentered_blossom(sp, b, s)) == oracles.ublossom(D, set(b), s)


@settings(max_examples=60, deadline=None)
@given(small_spaces(), st.data())
def test_ball_and_blossom_inclusions(sp, data):
    D = sp.distance_matrix()
    x = data.draw(st.integers(0, sp.n - 1))
    r = data.draw(st.fractions(Fraction(1, 4), 10, max_denominator=8))
    s = data.draw(st.fractions(Fraction(1, 4), 10, max_denominator=8))
    b = ball(sp, Ball(x, r))
    # ball monotonicity, open inside closed
    assert b <= ball(sp, Ball(x, r + s))
    assert b <= ball(sp, Ball(x, r, closed=True))
    bl = blossom(sp, b, s)
    blu = uncentered_blossom(sp, b, s)
    # S within Bl within Blu within Bl(S, 2s)
    assert b <= bl <= blu <= blossom(sp, b, 2 * s)
    # triangle inequality: Bl(B(x, r), s) within B(x, r + s)
    assert bl <= ball(sp, Ball(x, r + s))
    assert set(bl) == oracles.blossom(D, set(b), s)


@settings(max_examples=60, deadline=None)
@given(small_spaces(), st.data())
def test_measure_is_additive(sp, data):
    idx = data.draw(st.lists(st.integers(0, sp.n - 1), unique=True))
    other = data.draw(st.lists(st.integers(0, sp.n - 1), unique=True))
    a, b = PointSet.of(sp.n, idx), PointSet.of(sp.n, other)
    assert measure(sp, a | b) + measure(sp, a & b) == measure(sp, a) + measure(sp, b)
    assert measure(sp, a) == oracles.mu(sp.weights, set(idx))


@settings(max_examples=40, deadline=None)
@given(small_spaces(), st.data())
def test_balls_constant_between_critical_radii(sp, data):
    """Open balls change only at the critical radii."""
    ivs = radius_intervals(sp)
    x = data.draw(st.integers(0, sp.n - 1))
    for iv in ivs:
        hi = iv.hi if iv.hi is not None else iv.lo + 5
        ref = ball(sp, Ball(x, iv.rep))
        for k in range(1, 5):
            r = iv.lo + (hi - iv.lo) * Fraction(k, 4)
            assert ball(sp, Ball(x, r)) == ref


def test_pointset_operations():
    a = PointSet.of(5, [0, 1, 2])
    b = PointSet.of(5, [2, 3])
    assert (a | b).indices() == [0, 1, 2, 3]
    assert (a & b).indices() == [2]
    assert (a - b).indices() == [0, 1]
    assert not a.isdisjoint(b)
    assert PointSet.empty(5) <= a <= PointSet.full(5)
    assert 2 in a and 4 not in a and len(a) == 3
    with pytest.raises(ValueError):
        a | PointSet.empty(4)
