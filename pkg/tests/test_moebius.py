import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dplab.geometry import PolylineCurve, interval_curve, sample_polyline
from dplab.moebius import (INF, Moebius, PoleError, apply, cauchy_riemann_residual, compose,
                           gradient_identity_check, inverse, jacobian, jacobian_by_differences,
                           map_polyline, pullback_strength, sup_sqrt_jacobian)
from dplab.thresholds import arc_preimage
from dplab.solver2d import arc_polyline

RECIP = Moebius.reciprocal()
IDENT = Moebius.identity()

coef = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def moebius_maps(draw):
    a, b, c, d = (draw(coef) for _ in range(4))
    assume(abs(a * d - b * c) > 0.2)
    return Moebius(a, b, c, d)


def test_reciprocal_values():
    assert apply(RECIP, 1 + 1j) == pytest.approx(0.5 - 0.5j)
    assert apply(RECIP, INF) == 0
    assert apply(RECIP, 0) is INF
    assert apply(IDENT, 3 - 2j) == 3 - 2j
    assert apply(IDENT, INF) is INF


def test_affine_map_fixes_infinity():
    M = Moebius(2, 1, 0, 1)
    assert apply(M, INF) is INF
    assert M.pole is INF
    assert apply(M, 1j) == 1 + 2j


def test_degenerate_rejected():
    with pytest.raises(ValueError):
        Moebius(1, 2, 2, 4)


def test_reciprocal_is_involution():
    assert inverse(RECIP).same_map(RECIP)


def test_compose_with_inverse_is_identity():
    rng = np.random.default_rng(1)
    M = Moebius(1 + 2j, -0.5, 0.3j, 2)
    z = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    np.testing.assert_allclose(compose(M, inverse(M))(z), z, rtol=0, atol=1e-10 * np.max(np.abs(z)))


def test_compose_order():
    double, shift = Moebius(2, 0, 0, 1), Moebius(1, 1, 0, 1)
    assert compose(double, shift)(3.0) == pytest.approx(8.0)   # double after shift
    assert (shift @ double)(3.0) == pytest.approx(7.0)


def test_normalized_coefficients():
    M = compose(Moebius(5, 1, 0, 2), Moebius(3j, 0, 1, 7))
    assert max(abs(M.a), abs(M.b), abs(M.c), abs(M.d)) == pytest.approx(1.0)


def test_jacobian_values():
    assert jacobian(RECIP, 1 + 1j) == pytest.approx(0.25, rel=1e-15)
    assert jacobian(IDENT, 7 - 3j) == 1.0
    with pytest.raises(PoleError):
        jacobian(RECIP, 0.0)


def test_jacobian_against_differences():
    rng = np.random.default_rng(2)
    M = Moebius(1 - 1j, 2, 0.5 + 0.5j, -1)
    z = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
    z = z[np.abs(z - M.pole) > 0.3]
    for p in z:
        assert jacobian_by_differences(M, p) == pytest.approx(jacobian(M, p), rel=1e-6)


def test_arc_maps_to_segment():
    arc = arc_polyline(1.0, math.pi / 2, 201)
    seg = map_polyline(RECIP, arc)
    np.testing.assert_allclose(seg.vertices[[0, -1]], [[0.5, -0.5], [-0.5, -0.5]], atol=1e-12)
    np.testing.assert_allclose(seg.vertices[:, 1], -0.5, atol=1e-12)


def test_map_polyline_identity_and_round_trip():
    poly = arc_polyline(1.3, 0.7, 300)
    assert np.array_equal(map_polyline(IDENT, poly).vertices, poly.vertices)
    M = Moebius(1 + 1j, -2, 0.5, 3 - 1j)
    back = map_polyline(inverse(M), map_polyline(M, poly))
    np.testing.assert_allclose(back.vertices, poly.vertices, atol=1e-9)


def test_map_polyline_pole_guard():
    poly = PolylineCurve([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.5]])
    with pytest.raises(PoleError):
        map_polyline(RECIP, poly)


def test_pullback_identity():
    poly = sample_polyline(interval_curve(1.0), 50)
    table = pullback_strength(IDENT, poly, 0.7)
    np.testing.assert_allclose(table.values, 0.7)


def test_pullback_arc():
    gamma, M = arc_preimage(1.0, math.pi / 2)
    poly = sample_polyline(gamma, 2001, include_endpoints=True)
    table = pullback_strength(M, poly, 0.3)
    x, y = poly.vertices.T
    np.testing.assert_allclose(table.values, 0.3 / (x * x + y * y), rtol=1e-14)
    assert table.max == pytest.approx(0.3 * 4.0, rel=1e-12)
    assert sup_sqrt_jacobian(M, poly) == pytest.approx(4.0, rel=1e-12)
    assert np.all(table.values <= 0.3 * sup_sqrt_jacobian(M, poly) * (1 + 1e-14))


def test_pullback_scaling_map():
    poly = sample_polyline(interval_curve(2.0, (1.0, 1.0)), 40)
    table = pullback_strength(Moebius(2, 0, 0, 1), poly, lambda x, y: 0.5 + 0 * x)
    np.testing.assert_allclose(table.values, 1.0, rtol=1e-15)


def test_gradient_identity_trivial():
    assert gradient_identity_check(IDENT, lambda x, y: x, 0.3 + 0.2j) == pytest.approx(0.0, abs=1e-20)


def test_gradient_identity_reciprocal():
    rng = np.random.default_rng(3)
    u = lambda x, y: x * x - y * y
    pts = rng.uniform(0.5, 2.0, 20) * np.exp(1j * rng.uniform(0, 2 * np.pi, 20))
    for p in pts:
        w = complex(RECIP(p))
        scale = 4 * abs(w) ** 2 * jacobian(RECIP, p)      # |grad u|^2 J at the point
        assert gradient_identity_check(RECIP, u, p, 1e-4) < 1e-6 * max(scale, 1.0)


def test_gradient_identity_second_order():
    u = lambda x, y: np.sin(x) * y + x ** 3
    z = 0.7 + 0.4j
    r1 = gradient_identity_check(RECIP, u, z, 1e-2)
    r2 = gradient_identity_check(RECIP, u, z, 5e-3)
    assert r1 / r2 == pytest.approx(4.0, rel=0.15)


@given(moebius_maps(), moebius_maps(), moebius_maps())
def test_compose_associative(A, B, C):
    w = np.array([0.3 + 0.1j, -1.2 + 0.7j, 2.0 - 0.4j])
    lhs, rhs = compose(compose(A, B), C)(w), compose(A, compose(B, C))(w)
    finite = np.isfinite(lhs) & (np.abs(lhs) < 1e6)
    np.testing.assert_allclose(lhs[finite], rhs[finite], rtol=1e-10, atol=1e-10)


@given(moebius_maps())
def test_double_inverse(M):
    assert inverse(inverse(M)).same_map(M, tol=1e-12)
    w = np.array([0.1 + 0.2j, 1.5 - 0.5j, -0.7j])
    ok = np.abs(w - M.pole) > 1e-3 if M.pole is not INF else np.ones(3, bool)
    np.testing.assert_allclose(inverse(inverse(M))(w[ok]), M(w[ok]), rtol=1e-10)


@given(moebius_maps(), st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False))
def test_cauchy_riemann_second_order(M, z):
    assume(M.pole is INF or abs(z - M.pole) > 0.5)
    r1 = cauchy_riemann_residual(M, z, 1e-2)
    r2 = cauchy_riemann_residual(M, z, 5e-3)
    assert r2 <= max(0.3 * r1, 1e-9)


def test_chord_ratio_tends_to_sqrt_jacobian():
    M = Moebius(1 + 1j, -2, 0.5, 3 - 1j)
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        q = p + 1e-4 * np.exp(1j * rng.uniform(0, 2 * np.pi))
        ratio = abs(M(q) - M(p)) / abs(q - p)
        assert ratio == pytest.approx(math.sqrt(jacobian(M, 0.5 * (p + q))), rel=1e-3)


def test_curvilinear_integral_invariance():
    gamma, M = arc_preimage(1.5, 1.0)
    poly_g = sample_polyline(gamma, 998, include_endpoints=True)
    poly_l = map_polyline(M, poly_g)
    omega = lambda x, y: 1.0 + 0.5 * y
    jump = lambda x, y: np.exp(x) - y * y
    w = pullback_strength(M, poly_g, omega)
    x, y = poly_l.vertices.T
    trap = lambda f, poly: float(np.sum(0.5 * poly.segment_lengths * (f[:-1] + f[1:])))
    on_lambda = trap(omega(x, y) * jump(x, y) ** 2, poly_l)
    on_gamma = trap(w.values * jump(x, y) ** 2, poly_g)
    assert abs(on_gamma - on_lambda) <= 1e-4 * abs(on_lambda)
