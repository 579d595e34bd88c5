import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from dplab import loop1d
from dplab.loop1d import (LoopSpec, line_delta_prime_eigenvalue, line_fe_ground_state, loop_fe_matrices,
                          loop_fe_spectrum, loop_negative_eigenvalues, theta)


def _theta_exp(d, w, k):
    # second coding of the secular function, straight from the exponential form
    e = math.exp(-k * d)
    return (2 * w / k) * (1 - e) / (1 + e)


def test_theta_value():
    assert theta(LoopSpec(1, 1), 1.0) == pytest.approx(0.924234, abs=1e-6)
    assert theta(LoopSpec(1, 1), 1.0) == pytest.approx(_theta_exp(1, 1, 1.0), rel=1e-14)


def test_theta_small_kappa_limit():
    spec = LoopSpec(1.7, 0.8)
    assert abs(theta(spec, 1e-8) - spec.coupling) < 1e-6


def test_theta_vanishes_without_coupling():
    np.testing.assert_array_equal(theta(LoopSpec(3, 0.0), np.array([0.1, 1, 10])), 0.0)


def test_theta_rejects_nonpositive_kappa():
    with pytest.raises(ValueError):
        theta(LoopSpec(1, 1), 0.0)


def test_marginal_coupling_has_no_root():
    assert len(loop_negative_eigenvalues(LoopSpec(2 * math.pi, 1 / (2 * math.pi)))) == 0


def test_root_for_unit_loop():
    spec = LoopSpec(1.0, 2.0)
    kappa = brentq(lambda k: _theta_exp(1.0, 2.0, k) - 1.0, 1e-9, 4.0, xtol=1e-15)
    lam = loop_negative_eigenvalues(spec)
    assert len(lam) == 1
    assert lam.lowest == pytest.approx(-kappa * kappa, rel=1e-11)
    fe = loop_fe_spectrum(spec, n=4096).lowest
    assert fe == pytest.approx(-kappa * kappa, rel=1e-3)


def test_long_loop_approaches_line():
    lam = loop_negative_eigenvalues(LoopSpec(50.0, 1.0)).lowest
    assert abs(math.sqrt(-lam) - 2.0) < 1e-6
    assert lam == pytest.approx(line_delta_prime_eigenvalue(1.0), abs=1e-5)


def test_fe_marginal_is_nonnegative():
    assert loop_fe_spectrum(LoopSpec(2 * math.pi, 1 / (2 * math.pi)), n=2048).lowest >= -1e-8


def test_fe_neumann_spectrum():
    d = 2 * math.pi
    ev = loop_fe_spectrum(LoopSpec(d, 0.0), n=2048, k=2).eigenvalues
    assert abs(ev[0]) < 1e-8
    assert ev[1] == pytest.approx((math.pi / d) ** 2, rel=1e-3)


def test_fe_matrices_symmetric_with_corner_coupling():
    K, M = loop_fe_matrices(LoopSpec(1.0, 2.0), 16)
    Kd = K.toarray()
    np.testing.assert_allclose(Kd, Kd.T)
    assert Kd[0, -1] == pytest.approx(2.0)      # -omega * (-1) from the jump coupling
    assert M.toarray().sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        loop_fe_matrices(LoopSpec(1.0, 2.0), 8)


def test_line_eigenvalue():
    assert line_delta_prime_eigenvalue(1.0) == -4.0
    assert line_delta_prime_eigenvalue(0.5) == -1.0
    assert line_delta_prime_eigenvalue(0.0) is None
    assert line_delta_prime_eigenvalue(-1.0) is None


def test_line_fe_ground_state():
    assert abs(line_fe_ground_state(1.0) + 4.0) < 1e-2


def test_fe_second_order_convergence():
    spec = LoopSpec(1.0, 2.0)
    exact = loop_negative_eigenvalues(spec).lowest
    ns = np.array([64, 128, 256, 512])
    err = [abs(loop_fe_spectrum(spec, n=int(n), tol=1e-11).lowest - exact) for n in ns]
    slope = np.polyfit(np.log(1.0 / ns), np.log(err), 1)[0]
    assert slope == pytest.approx(2.0, rel=0.15)


lengths = st.floats(0.05, 20.0)
strengths = st.floats(1e-3, 10.0)


@given(lengths, strengths)
def test_theta_decreasing_and_below_coupling(d, w):
    spec = LoopSpec(d, w)
    k = np.geomspace(1e-6, 50 * w + 50 / d, 400)
    th = theta(spec, k)
    # non-increasing up to round-off everywhere, strictly decreasing once k d is resolvable
    assert np.all(np.diff(th) <= 4 * np.finfo(float).eps * th[:-1])
    resolved = (k[:-1] * d > 1e-3) & (th[1:] > 1e-300)
    assert np.all(np.diff(th)[resolved] < 0)
    assert np.all(th <= spec.coupling * (1 + 1e-15))


def test_root_count_over_random_pairs():
    rng = np.random.default_rng(11)
    d = rng.uniform(0.1, 10, 200)
    w = rng.uniform(-2, 3, 200)
    for di, wi in zip(d, w):
        n_roots = len(loop_negative_eigenvalues(LoopSpec(di, wi)))
        assert n_roots == (1 if di * wi > 1 else 0)


@given(st.floats(0.2, 5.0), st.floats(0.3, 5.0), st.floats(0.2, 5.0))
def test_scaling_law(d, w, t):
    base = loop_negative_eigenvalues(LoopSpec(d, w))
    scaled = loop_negative_eigenvalues(LoopSpec(t * d, w / t))
    assert len(base) == len(scaled) or abs(d * w - 1) < 1e-12
    if len(base) and len(scaled):
        assert base.lowest == pytest.approx(t * t * scaled.lowest, rel=1e-10)
