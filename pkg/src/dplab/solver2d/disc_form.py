"""Quadrature of the disc form ``||grad u||^2_{D_R} - int_Lambda omega [u]^2 ds``.

Test fields jump only across a monotone curve centred at the disc centre.
In shifted polar coordinates ``(r, t)`` with ``t = theta - phi(r)`` in
``(0, 2 pi)`` the curve sits at ``t = 0`` and ``t = 2 pi``, so the field
is smooth on the open rectangle and a tensor Gauss rule integrates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P

from ..geometry import MonotoneCurve, PolylineCurve

ScalarFn = Callable[[np.ndarray], np.ndarray]
OmegaOfRadius = Union[float, Callable[[np.ndarray], np.ndarray]]

_FD_STEP = 1e-6


def _central(f: ScalarFn, x: np.ndarray, step: float = _FD_STEP) -> np.ndarray:
    return (f(x + step) - f(x - step)) / (2.0 * step)


@dataclass(frozen=True)
class JumpField:
    """``u = b(x, y) + A(r) g(t)`` around the origin of ``curve``.

    ``A`` should vanish at ``r = 0`` so the field has finite energy.  Exact
    derivatives may be supplied; otherwise central differences are used.
    """

    curve: MonotoneCurve
    amplitude: ScalarFn
    profile: ScalarFn
    background: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    amplitude_deriv: Optional[ScalarFn] = None
    profile_deriv: Optional[ScalarFn] = None
    background_grad: Optional[Callable[[np.ndarray, np.ndarray], tuple]] = None

    @classmethod
    def random(cls, curve: MonotoneCurve, rng: np.random.Generator, radius: float,
               n_modes: int = 3) -> "JumpField":
        """Polynomial amplitude and background with a trigonometric-plus-linear profile."""
        a = rng.standard_normal(3)
        amp = np.concatenate([[0.0], a])                   # A(r) = r (a0 + a1 r + a2 r^2)
        amp = amp * np.array([1.0, 1.0, 1.0 / radius, 1.0 / radius ** 2])
        lin = rng.standard_normal(2)
        ks = np.arange(1, n_modes + 1)
        cs, sn = rng.standard_normal((2, n_modes)) / ks
        bx = rng.standard_normal(6) / radius               # quadratic background

        def g(t):
            t = np.asarray(t, dtype=float)
            return lin[0] + lin[1] * t + np.cos(np.multiply.outer(t, ks)) @ cs \
                + np.sin(np.multiply.outer(t, ks)) @ sn

        def dg(t):
            t = np.asarray(t, dtype=float)
            return lin[1] - np.sin(np.multiply.outer(t, ks)) @ (ks * cs) \
                + np.cos(np.multiply.outer(t, ks)) @ (ks * sn)

        ox, oy = curve.origin

        def b(x, y):
            X, Y = x - ox, y - oy
            return bx[0] + bx[1] * X + bx[2] * Y + bx[3] * X * X + bx[4] * X * Y + bx[5] * Y * Y

        def db(x, y):
            X, Y = x - ox, y - oy
            return bx[1] + 2 * bx[3] * X + bx[4] * Y, bx[2] + bx[4] * X + 2 * bx[5] * Y

        damp = P.polyder(amp)
        return cls(curve, lambda r: P.polyval(r, amp), g, b, lambda r: P.polyval(r, damp), dg, db)

    def _shifted_angle(self, x, y):
        ox, oy = self.curve.origin
        X, Y = np.asarray(x, dtype=float) - ox, np.asarray(y, dtype=float) - oy
        r = np.hypot(X, Y)
        theta = np.arctan2(Y, X)
        t = np.mod(theta - self.curve.phi.value(r), 2.0 * np.pi)
        return r, theta, t

    def values(self, x, y, side: Optional[np.ndarray] = None) -> np.ndarray:
        """Field values; ``side`` (+1/-1/0) picks ``t = 0`` or ``t = 2 pi`` for points on the curve."""
        r, _, t = self._shifted_angle(x, y)
        if side is not None:
            side = np.broadcast_to(side, t.shape)
            t = np.where(side > 0, 0.0, np.where(side < 0, 2.0 * np.pi, t))
        out = self.amplitude(r) * self.profile(t)
        if self.background is not None:
            out = out + self.background(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return out

    def jump(self, r) -> np.ndarray:
        """``u(t = 0+) - u(t = 2 pi-)`` at radius ``r`` on the curve."""
        return self.amplitude(r) * (self.profile(0.0) - self.profile(2.0 * np.pi))

    def gradient_polar(self, r, t):
        """Cartesian gradient at shifted polar coordinates ``(r, t)``."""
        phi = self.curve.phi
        theta = phi.value(r) + t
        A = self.amplitude(r)
        dA = self.amplitude_deriv(r) if self.amplitude_deriv else _central(self.amplitude, r)
        g = self.profile(t)
        dg = self.profile_deriv(t) if self.profile_deriv else _central(self.profile, t)
        radial = dA * g - A * dg * phi.deriv(r)
        angular = A * dg / r
        c, s = np.cos(theta), np.sin(theta)
        gx = radial * c - angular * s
        gy = radial * s + angular * c
        if self.background is not None:
            ox, oy = self.curve.origin
            x, y = ox + r * c, oy + r * s
            if self.background_grad is not None:
                bx, by = self.background_grad(x, y)
            else:
                bx = _central(lambda xx: self.background(xx, y), x)
                by = _central(lambda yy: self.background(x, yy), y)
            gx, gy = gx + bx, gy + by
        return gx, gy


def _omega_values(omega: OmegaOfRadius, r: np.ndarray) -> np.ndarray:
    if callable(omega):
        return np.broadcast_to(np.asarray(omega(r), dtype=float), r.shape)
    return np.full(r.shape, float(omega))


def gradient_energy(u: JumpField, R: float, quad_n: int = 64) -> float:
    """``||grad u||^2`` over the disc of radius ``R`` by tensor Gauss-Legendre in ``(r, t)``."""
    x, w = np.polynomial.legendre.leggauss(quad_n)
    r, wr = 0.5 * R * (x + 1.0), 0.5 * R * w
    t, wt = np.pi * (x + 1.0), np.pi * w
    rr, tt = np.meshgrid(r, t, indexing="ij")
    gx, gy = u.gradient_polar(rr, tt)
    return float(np.einsum("i,j,ij->", wr * r, wt, gx * gx + gy * gy))


def interface_energy(u: JumpField, poly: PolylineCurve, omega: OmegaOfRadius) -> float:
    """Trapezoid rule for ``int omega [u]^2 ds`` along the polyline vertices."""
    ox, oy = u.curve.origin
    r = np.hypot(poly.vertices[:, 0] - ox, poly.vertices[:, 1] - oy)
    j2 = u.jump(r) ** 2
    f = np.zeros_like(r)
    nz = j2 != 0.0
    # strength may blow up where the jump vanishes (e.g. at the origin)
    f[nz] = _omega_values(omega, r[nz]) * j2[nz]
    ds = poly.segment_lengths
    return float(np.sum(0.5 * ds * (f[:-1] + f[1:])))


def evaluate_disc_form(u: JumpField, poly: PolylineCurve, omega: OmegaOfRadius, R: float,
                       quad_n: int = 64) -> float:
    """Gradient energy over ``D_R`` minus the interface energy along ``poly``.

    ``omega`` is a constant or a function of the distance from the disc centre.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    ox, oy = u.curve.origin
    dist = np.hypot(poly.vertices[:, 0] - ox, poly.vertices[:, 1] - oy)
    if np.max(dist) > R * (1.0 + 1e-12):
        raise ValueError(f"polyline leaves the disc of radius {R} (max distance {np.max(dist):.6g})")
    return gradient_energy(u, R, quad_n) - interface_energy(u, poly, omega)


def field_scale(u: JumpField, R: float, quad_n: int = 64) -> float:
    """Normalization for sign tests: the gradient energy (at least 1e-300)."""
    return max(gradient_energy(u, R, quad_n), 1e-300)


def pointwise_threshold_profile(curve: MonotoneCurve) -> Callable[[np.ndarray], np.ndarray]:
    """``omega(r) = 1 / (2 pi r j(r))``: the largest admissible radial strength."""
    return lambda r: 1.0 / (2.0 * math.pi * np.asarray(r) * curve.arc_elements(r))
