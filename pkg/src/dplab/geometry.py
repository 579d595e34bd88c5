"""Non-closed plane curves: monotone polar parametrizations and polylines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

__all__ = [
    "Point2",
    "ConstantPhi",
    "LinearPhi",
    "TabulatedPhi",
    "AnalyticPhi",
    "MonotoneCurve",
    "PolylineCurve",
    "CurveDomainError",
    "monotone_point",
    "arc_element",
    "sample_polyline",
    "is_monotone_from",
    "interval_curve",
    "spiral_curve",
]

INTERSECTION_EPS = 1e-12


class CurveDomainError(ValueError):
    """Evaluation outside the radial range of a curve."""


class Point2(NamedTuple):
    x: float
    y: float

    @classmethod
    def of(cls, p) -> "Point2":
        x, y = float(p[0]), float(p[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"point coordinates must be finite, got ({x}, {y})")
        return cls(x, y)


# Angular profiles.  Each maps radius r to the polar angle phi(r) and its
# derivative; all accept numpy arrays.

@dataclass(frozen=True)
class ConstantPhi:
    angle: float = 0.0

    def value(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.angle)

    def deriv(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def scaled(self, t: float) -> "ConstantPhi":
        return self


@dataclass(frozen=True)
class LinearPhi:
    slope: float
    offset: float = 0.0

    def value(self, r):
        return self.slope * np.asarray(r, dtype=float) + self.offset

    def deriv(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.slope)

    def scaled(self, t: float) -> "LinearPhi":
        return LinearPhi(self.slope / t, self.offset)


@dataclass(frozen=True)
class TabulatedPhi:
    """Piecewise-linear interpolation of tabulated phi and phi' values.

    The interpolated derivative is continuous, so the right-limit value at a
    breakpoint is simply the tabulated derivative there.  Outside the table
    both are held constant.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        d = np.asarray(self.derivatives, dtype=float)
        if r.ndim != 1 or r.size < 2 or v.shape != r.shape or d.shape != r.shape:
            raise ValueError("tabulated profile needs matching 1-D arrays with >= 2 entries")
        if np.any(np.diff(r) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(d))):
            raise ValueError("tabulated values must be finite")
        for name, arr in (("breakpoints", r), ("values", v), ("derivatives", d)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_function(cls, phi, dphi, breakpoints) -> "TabulatedPhi":
        r = np.asarray(breakpoints, dtype=float)
        return cls(r, phi(r), dphi(r))

    def value(self, r):
        return np.interp(r, self.breakpoints, self.values)

    def deriv(self, r):
        return np.interp(r, self.breakpoints, self.derivatives)

    def scaled(self, t: float) -> "TabulatedPhi":
        return TabulatedPhi(t * self.breakpoints, self.values, self.derivatives / t)


@dataclass(frozen=True)
class AnalyticPhi:
    """Profile given by vectorized callables for phi and its exact derivative."""

    func: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    name: str = "analytic"

    def value(self, r):
        return np.asarray(self.func(np.asarray(r, dtype=float)), dtype=float)

    def deriv(self, r):
        return np.asarray(self.derivative(np.asarray(r, dtype=float)), dtype=float)

    def scaled(self, t: float) -> "AnalyticPhi":
        f, df = self.func, self.derivative
        return AnalyticPhi(lambda r: f(r / t), lambda r: df(r / t) / t, self.name)


@dataclass(frozen=True)
class MonotoneCurve:
    """Curve ``origin + (r cos phi(r), r sin phi(r))`` for ``0 < r < extent``."""

    origin: Point2
    extent: float
    phi: object = field(default_factory=ConstantPhi)

    def __post_init__(self):
        object.__setattr__(self, "origin", Point2.of(self.origin))
        extent = float(self.extent)
        if not extent > 0:
            raise ValueError("extent must be positive")
        object.__setattr__(self, "extent", extent)
        if isinstance(self.phi, TabulatedPhi):
            r = self.phi.breakpoints
            if r[0] <= 0 or r[-1] >= extent:
                raise ValueError("tabulated breakpoints must lie inside (0, extent)")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.extent)

    def _check(self, r, closed=False):
        r = np.asarray(r, dtype=float)
        ok = (r >= 0) & (r <= self.extent) if closed else (r > 0) & (r < self.extent)
        if not np.all(ok):
            raise CurveDomainError(f"radius outside (0, {self.extent})")
        return r

    def points(self, r, closed=False) -> np.ndarray:
        """Vectorized point evaluation, shape ``(..., 2)``."""
        r = self._check(r, closed)
        ang = self.phi.value(r)
        if not np.all(np.isfinite(ang)):
            raise ValueError("phi is not finite at the requested radii")
        return np.stack([self.origin.x + r * np.cos(ang), self.origin.y + r * np.sin(ang)], axis=-1)

    def arc_elements(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.hypot(1.0, r * self.phi.deriv(r))

    def scaled(self, t: float) -> "MonotoneCurve":
        """The image under ``x -> origin + t (x - origin)``."""
        if not t > 0:
            raise ValueError("scale factor must be positive")
        return MonotoneCurve(self.origin, t * self.extent, self.phi.scaled(t))


def interval_curve(length: float, origin=(0.0, 0.0), angle: float = 0.0) -> MonotoneCurve:
    return MonotoneCurve(Point2.of(origin), length, ConstantPhi(angle))


def spiral_curve(extent: float = math.inf, slope: float = 1.0, origin=(0.0, 0.0)) -> MonotoneCurve:
    """Archimedean spiral ``phi(r) = slope * r``."""
    return MonotoneCurve(Point2.of(origin), extent, LinearPhi(slope))


def monotone_point(curve: MonotoneCurve, r: float) -> Point2:
    return Point2(*map(float, curve.points(float(r))))


def arc_element(curve: MonotoneCurve, r: float) -> float:
    """``sqrt(1 + (r phi'(r))^2)``, the arc length per unit radius."""
    curve._check(r)
    return float(curve.arc_elements(float(r)))


def _segment_orientation(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _on_segment(a, b, c, eps):
    return ((np.minimum(a[..., 0], b[..., 0]) - eps <= c[..., 0]) & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]) + eps)
            & (np.minimum(a[..., 1], b[..., 1]) - eps <= c[..., 1]) & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]) + eps))


def _segments_intersect(p1, p2, p3, p4, eps):
    d1 = _segment_orientation(p3, p4, p1)
    d2 = _segment_orientation(p3, p4, p2)
    d3 = _segment_orientation(p1, p2, p3)
    d4 = _segment_orientation(p1, p2, p4)
    proper = (((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))) & \
             (((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps)))
    touch = ((np.abs(d1) <= eps) & _on_segment(p3, p4, p1, eps)) | \
            ((np.abs(d2) <= eps) & _on_segment(p3, p4, p2, eps)) | \
            ((np.abs(d3) <= eps) & _on_segment(p1, p2, p3, eps)) | \
            ((np.abs(d4) <= eps) & _on_segment(p1, p2, p4, eps))
    return proper | touch


def _find_self_intersection(v: np.ndarray, eps: float) -> Optional[tuple]:
    a, b = v[:-1], v[1:]
    m = a.shape[0]
    if m < 3:
        return None
    xlo = np.minimum(a[:, 0], b[:, 0])
    xhi = np.maximum(a[:, 0], b[:, 0])
    order = np.argsort(xlo, kind="stable")
    xlo_sorted = xlo[order]
    for pos, i in enumerate(order):
        # sweep: only segments whose x-range starts before this one ends can meet it
        stop = np.searchsorted(xlo_sorted, xhi[i] + eps, side="right")
        cand = order[pos + 1:stop]
        cand = cand[np.abs(cand - i) > 1]
        if cand.size == 0:
            continue
        hit = _segments_intersect(a[i], b[i], a[cand], b[cand], eps)
        if np.any(hit):
            return int(i), int(cand[np.argmax(hit)])
    return None


@dataclass(frozen=True)
class PolylineCurve:
    """Ordered vertices of a simple open polyline with its arc-length table."""

    vertices: np.ndarray
    cumulative_length: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ValueError("a polyline needs at least two 2-D vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        seg = np.hypot(*np.diff(v, axis=0).T)
        if np.any(seg == 0.0):
            raise ValueError("consecutive vertices must be distinct")
        scale = max(float(np.max(np.abs(v))), 1.0)
        hit = _find_self_intersection(v, INTERSECTION_EPS * scale * scale)
        if hit is not None:
            raise ValueError(f"polyline segments {hit[0]} and {hit[1]} intersect")
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        v.setflags(write=False)
        cum.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "cumulative_length", cum)

    @property
    def length(self) -> float:
        return float(self.cumulative_length[-1])

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.diff(self.cumulative_length)

    @property
    def complex(self) -> np.ndarray:
        return self.vertices[:, 0] + 1j * self.vertices[:, 1]

    def __len__(self):
        return self.vertices.shape[0]


def sample_polyline(curve: MonotoneCurve, n: int, truncate: Optional[float] = None,
                    include_endpoints: bool = False) -> PolylineCurve:
    """Vertices at radii ``R k / (n + 1)``, ``k = 1..n``.

    ``R`` is the curve extent, or ``truncate`` for unbounded curves.  With
    ``include_endpoints`` the limit points at ``r = 0`` and ``r = R`` are
    added, so the chord length approximates the full curve length.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    R = curve.extent
    if truncate is not None:
        if not 0 < truncate <= R:
            raise ValueError("truncation radius must lie in (0, extent]")
        R = float(truncate)
    if not math.isfinite(R):
        raise ValueError("unbounded curve: pass an explicit truncation radius")
    k = np.arange(0, n + 2) if include_endpoints else np.arange(1, n + 1)
    r = R * (k / (n + 1))   # k / (n + 1) is exactly 1 at the far endpoint
    pts = curve.points(r, closed=True)
    if include_endpoints:
        pts[0] = curve.origin
    return PolylineCurve(pts)


def is_monotone_from(poly: PolylineCurve, x0) -> bool:
    """True iff the distance from ``x0`` strictly increases along the vertices."""
    x0 = Point2.of(x0)
    d = np.hypot(poly.vertices[:, 0] - x0.x, poly.vertices[:, 1] - x0.y)
    return bool(np.all(np.diff(d) > 0))
