import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from dplab.geometry import (ConstantPhi, CurveDomainError, LinearPhi, MonotoneCurve, PolylineCurve,
                            TabulatedPhi, arc_element, interval_curve, is_monotone_from, monotone_point,
                            sample_polyline, spiral_curve)


def test_spiral_point_at_pi():
    p = monotone_point(spiral_curve(10.0), math.pi)
    assert p.x == pytest.approx(-math.pi, abs=1e-15)
    assert p.y == pytest.approx(0.0, abs=1e-15)


def test_interval_point_and_origin_shift():
    assert tuple(monotone_point(interval_curve(1.0), 0.5)) == (0.5, 0.0)
    p = monotone_point(spiral_curve(10.0, origin=(1.0, -2.0)), math.pi)
    assert p.x == pytest.approx(1.0 - math.pi) and p.y == pytest.approx(-2.0, abs=1e-15)


def test_tabulated_matches_linear_profile():
    r = np.linspace(1e-4, 1.9999, 10_000)
    curve = MonotoneCurve((0, 0), 2.0, TabulatedPhi(r, r, np.ones_like(r)))
    p = monotone_point(curve, 1.0)
    assert math.hypot(p.x - math.cos(1.0), p.y - math.sin(1.0)) < 1e-6


@pytest.mark.parametrize("r", [0.0, -0.1, 1.0, 1.5])
def test_point_out_of_range(r):
    with pytest.raises(CurveDomainError):
        monotone_point(interval_curve(1.0), r)


def test_arc_elements():
    assert arc_element(interval_curve(3.0), 1.7) == 1.0
    sp = spiral_curve(10.0)
    assert arc_element(sp, 1.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert arc_element(sp, 2.0) == pytest.approx(math.sqrt(5.0), rel=1e-15)


def test_arc_element_at_breakpoint_uses_tabulated_derivative():
    r = np.array([0.5, 1.0, 1.5])
    curve = MonotoneCurve((0, 0), 2.0, TabulatedPhi(r, np.zeros(3), np.array([0.0, 2.0, -1.0])))
    assert arc_element(curve, 1.0) == pytest.approx(math.sqrt(5.0))
    assert arc_element(curve, 1.25) == pytest.approx(math.hypot(1.0, 1.25 * 0.5))


def test_tabulated_validation():
    with pytest.raises(ValueError):
        TabulatedPhi(np.array([0.5, 0.4]), np.zeros(2), np.zeros(2))
    with pytest.raises(ValueError):
        MonotoneCurve((0, 0), 1.0, TabulatedPhi(np.array([0.5, 1.0]), np.zeros(2), np.zeros(2)))
    with pytest.raises(ValueError):
        MonotoneCurve((0, 0), -1.0)


def test_sample_interval_three_points():
    poly = sample_polyline(interval_curve(1.0), 3)
    np.testing.assert_allclose(poly.vertices, [[0.25, 0], [0.5, 0], [0.75, 0]], atol=1e-15)
    np.testing.assert_allclose(poly.cumulative_length, [0, 0.25, 0.5])


def test_semicircle_length(semicircle):
    poly = sample_polyline(semicircle, 1000, include_endpoints=True)
    assert abs(poly.length - math.pi) < 1e-4


def test_spiral_length_against_quadrature():
    exact, _ = quad(lambda r: math.sqrt(1 + r * r), 0.0, 1.0)
    poly = sample_polyline(spiral_curve(1.0), 1000, include_endpoints=True)
    assert abs(poly.length - exact) < 1e-3


def test_unbounded_curve_needs_truncation():
    with pytest.raises(ValueError):
        sample_polyline(spiral_curve(), 10)
    assert len(sample_polyline(spiral_curve(), 10, truncate=2.0)) == 10


def test_monotone_from_endpoints(semicircle):
    semi = sample_polyline(semicircle, 200, include_endpoints=True)
    assert is_monotone_from(semi, semi.vertices[0])
    assert is_monotone_from(PolylineCurve(semi.vertices[::-1]), semi.vertices[-1])
    t = np.linspace(0.0, 1.5 * math.pi, 300)
    three_quarter = PolylineCurve(np.column_stack([np.cos(t), np.sin(t)]))
    assert not is_monotone_from(three_quarter, three_quarter.vertices[0])
    assert not is_monotone_from(PolylineCurve(three_quarter.vertices[::-1]), three_quarter.vertices[-1])
    seg = PolylineCurve([[0, 0], [0.3, 0.1], [0.6, 0.2]])
    assert is_monotone_from(seg, seg.vertices[0])


def test_polyline_rejects_bad_input():
    with pytest.raises(ValueError):
        PolylineCurve([[0, 0], [0, 0], [1, 0]])
    with pytest.raises(ValueError):
        PolylineCurve([[0, 0], [1, 1], [1, 0], [0, 1]])   # bow tie
    with pytest.raises(ValueError):
        PolylineCurve([[0, 0]])


slopes = st.floats(-5, 5, allow_nan=False)
radii = st.floats(1e-3, 9.99)


@given(slopes, st.floats(-3, 3), radii)
def test_arc_element_at_least_one(a, b, r):
    assert arc_element(MonotoneCurve((0, 0), 10.0, LinearPhi(a, b)), r) >= 1.0


@given(slopes, st.floats(-3, 3), radii, st.floats(-5, 5), st.floats(-5, 5))
def test_point_distance_is_radius(a, b, r, ox, oy):
    p = monotone_point(MonotoneCurve((ox, oy), 10.0, LinearPhi(a, b)), r)
    scale = max(abs(ox), abs(oy), r)
    assert abs(math.hypot(p.x - ox, p.y - oy) - r) <= 4 * np.spacing(scale) * 4


@given(st.floats(-3, 3), st.floats(0.5, 5), st.integers(2, 400))
def test_samples_are_monotone_from_origin(a, R, n):
    curve = MonotoneCurve((0.3, -0.2), R, LinearPhi(a))
    assert is_monotone_from(sample_polyline(curve, n), curve.origin)


@given(st.floats(-3, 3), st.floats(0.5, 3))
def test_chord_length_monotone_and_bounded(a, R):
    curve = MonotoneCurve((0, 0), R, LinearPhi(a))
    arc, _ = quad(lambda r: math.hypot(1.0, r * a), 0.0, R, epsabs=1e-13, epsrel=1e-13)
    lengths = [sample_polyline(curve, n, include_endpoints=True).length for n in range(2, 60)]
    assert np.all(np.diff(lengths) >= -1e-12)
    assert max(lengths) <= arc * (1 + 1e-12)
