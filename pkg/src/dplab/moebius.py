"""Linear fractional transformations of the extended complex plane."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .geometry import PolylineCurve

__all__ = [
    "INF",
    "ExtComplex",
    "Moebius",
    "PoleError",
    "StrengthTable",
    "apply",
    "inverse",
    "compose",
    "jacobian",
    "map_polyline",
    "pullback_strength",
    "gradient_identity_check",
]

POLE_TOL = 1e-9
DEGENERACY_TOL = 1e-14


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ExtComplex = Union[complex, _Infinity]


class PoleError(ValueError):
    """A point coincides with (or is too close to) the pole of a transformation."""


@dataclass(frozen=True)
class Moebius:
    """``z -> (a z + b) / (c z + d)``.

    Coefficients are stored normalized to ``max(|a|, |b|, |c|, |d|) == 1``;
    the map itself does not change.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        coef = np.array([self.a, self.b, self.c, self.d], dtype=complex)
        if not np.all(np.isfinite(coef)):
            raise ValueError("coefficients must be finite")
        scale = np.max(np.abs(coef))
        if scale == 0:
            raise ValueError("all coefficients are zero")
        coef = coef / scale
        a, b, c, d = (complex(x) for x in coef)
        if abs(a * d - b * c) <= DEGENERACY_TOL:
            raise ValueError("degenerate transformation: ad - bc = 0")
        for name, value in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, value)

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(1, 0, 0, 1)

    @classmethod
    def reciprocal(cls) -> "Moebius":
        """``z -> 1/z``."""
        return cls(0, 1, 1, 0)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def pole(self) -> ExtComplex:
        """The preimage of infinity."""
        return INF if self.c == 0 else -self.d / self.c

    @property
    def image_of_infinity(self) -> ExtComplex:
        return INF if self.c == 0 else self.a / self.c

    def __call__(self, z):
        """Vectorized evaluation at finite points (the pole maps to ``inf``)."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.a * z + self.b) / (self.c * z + self.d)

    def __matmul__(self, other: "Moebius") -> "Moebius":
        return compose(self, other)

    def same_map(self, other: "Moebius", tol: float = 1e-12) -> bool:
        m1 = np.array([[self.a, self.b], [self.c, self.d]])
        m2 = np.array([[other.a, other.b], [other.c, other.d]])
        # projective equality: m1 = s * m2 for some scalar s
        k = np.unravel_index(np.argmax(np.abs(m2)), m2.shape)
        s = m1[k] / m2[k]
        return bool(np.max(np.abs(m1 - s * m2)) <= tol)


def apply(M: Moebius, z: ExtComplex) -> ExtComplex:
    """Evaluate on the extended plane, special points included."""
    if z is INF:
        return M.image_of_infinity
    z = complex(z)
    if M.c == 0:
        return (M.a / M.d) * z + M.b / M.d
    if z == -M.d / M.c:
        return INF
    return (M.a * z + M.b) / (M.c * z + M.d)


def inverse(M: Moebius) -> Moebius:
    return Moebius(M.d, -M.b, -M.c, M.a)


def compose(M1: Moebius, M2: Moebius) -> Moebius:
    """``M1 o M2``: apply ``M2`` first."""
    return Moebius(M1.a * M2.a + M1.b * M2.c, M1.a * M2.b + M1.b * M2.d,
                   M1.c * M2.a + M1.d * M2.c, M1.c * M2.b + M1.d * M2.d)


def jacobian(M: Moebius, z) -> Union[float, np.ndarray]:
    """Area distortion ``|M'(z)|^2 = |ad - bc|^2 / |cz + d|^4``.

    Accepts scalars or arrays of finite points; raises :class:`PoleError`
    at the pole.
    """
    z = np.asarray(z, dtype=complex)
    den = np.abs(M.c * z + M.d)
    if np.any(den == 0):
        raise PoleError("Jacobian is singular at the pole")
    out = abs(M.det) ** 2 / den ** 4
    return float(out) if out.ndim == 0 else out


def _check_pole_distance(M: Moebius, z: np.ndarray, what: str):
    if M.c == 0:
        return
    dist = np.abs(z - M.pole)
    if np.any(dist < POLE_TOL):
        raise PoleError(f"{what} passes within {POLE_TOL} of the pole {M.pole}")


def map_polyline(M: Moebius, poly: PolylineCurve) -> PolylineCurve:
    """Vertex-wise image of a polyline (arc lengths recomputed)."""
    z = poly.complex
    _check_pole_distance(M, z, "polyline")
    w = M(z)
    return PolylineCurve(np.column_stack([w.real, w.imag]))


@dataclass(frozen=True)
class StrengthTable:
    """A strength tabulated at the vertices of a polyline, indexed by arc length."""

    arc_length: np.ndarray
    points: np.ndarray
    values: np.ndarray

    def __call__(self, s):
        return np.interp(s, self.arc_length, self.values)

    def at_x(self, x):
        """Interpolate against the x coordinate (for curves that are graphs over x)."""
        order = np.argsort(self.points[:, 0])
        return np.interp(x, self.points[order, 0], self.values[order])

    @property
    def max(self) -> float:
        return float(np.max(self.values))


Strength = Union[float, Callable[[np.ndarray, np.ndarray], np.ndarray]]


def pullback_strength(M: Moebius, poly_gamma: PolylineCurve, omega: Strength) -> StrengthTable:
    """Transport a strength on ``Lambda = M(Gamma)`` back to ``Gamma``.

    ``omega_tilde(z) = omega(M(z)) * sqrt(J_M(z))`` at the vertices ``z`` of
    ``poly_gamma``; ``omega`` is a constant or a callable ``omega(x, y)`` on
    ``Lambda``.
    """
    z = poly_gamma.complex
    _check_pole_distance(M, z, "curve")
    w = M(z)
    if callable(omega):
        base = np.broadcast_to(np.asarray(omega(w.real, w.imag), dtype=float), z.shape)
    else:
        base = np.full(z.shape, float(omega))
    values = base * np.sqrt(jacobian(M, z))
    return StrengthTable(poly_gamma.cumulative_length.copy(), poly_gamma.vertices.copy(), values)


def gradient_identity_check(M: Moebius, u: Callable, z: complex, h: float = 1e-4) -> float:
    """Residual of ``|grad(u o M)(z)|^2 = |grad u(M(z))|^2 J_M(z)``.

    Both gradients come from central differences with step ``h``, so the
    residual is ``O(h^2)`` for smooth ``u``.  ``u`` takes ``(x, y)``.
    """
    z = complex(z)
    if M.c != 0 and abs(z - M.pole) < POLE_TOL:
        raise PoleError("point too close to the pole")

    def v(x, y):
        w = M(x + 1j * y)
        return u(w.real, w.imag)

    def grad_sq(f, x, y):
        gx = (f(x + h, y) - f(x - h, y)) / (2 * h)
        gy = (f(x, y + h) - f(x, y - h)) / (2 * h)
        return abs(gx) ** 2 + abs(gy) ** 2

    w = complex(M(z))
    lhs = grad_sq(v, z.real, z.imag)
    rhs = grad_sq(u, w.real, w.imag) * jacobian(M, z)
    return float(abs(lhs - rhs))


def cauchy_riemann_residual(M: Moebius, z: complex, h: float = 1e-4) -> float:
    """Max violation of the Cauchy-Riemann equations by central differences."""
    z = complex(z)
    fx = (M(z + h) - M(z - h)) / (2 * h)
    fy = (M(z + 1j * h) - M(z - 1j * h)) / (2 * h)
    # d/dx M1 = d/dy M2 and d/dx M2 = -d/dy M1
    return float(max(abs(fx.real - fy.imag), abs(fx.imag + fy.real)))


def jacobian_by_differences(M: Moebius, z: complex, h: float = 1e-5) -> float:
    """``(d_x M1)^2 + (d_y M1)^2`` with central differences (test oracle)."""
    z = complex(z)
    fx = (M(z + h) - M(z - h)) / (2 * h)
    fy = (M(z + 1j * h) - M(z - 1j * h)) / (2 * h)
    return float(fx.real ** 2 + fy.real ** 2)


def sup_sqrt_jacobian(M: Moebius, poly: PolylineCurve, iters: int = 80) -> float:
    """Supremum of ``sqrt(J_M)`` over a polyline.

    Dense vertex sampling locates the maximizer; golden-section search on
    the two neighbouring segments refines it.
    """
    z = poly.complex
    _check_pole_distance(M, z, "curve")
    vals = np.sqrt(jacobian(M, z))
    k = int(np.argmax(vals))
    best = float(vals[k])
    invphi = (math.sqrt(5) - 1) / 2
    for j in (k - 1, k):
        if j < 0 or j + 1 >= z.size:
            continue
        p, q = z[j], z[j + 1]
        f = lambda t: -math.sqrt(jacobian(M, p + t * (q - p)))
        lo, hi = 0.0, 1.0
        x1, x2 = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
        f1, f2 = f(x1), f(x2)
        for _ in range(iters):
            if f1 < f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - invphi * (hi - lo)
                f1 = f(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + invphi * (hi - lo)
                f2 = f(x2)
        best = max(best, -f1, -f2)
    return best
