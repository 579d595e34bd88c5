"""Closed-form non-negativity and bound-state thresholds, and a verdict classifier."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .geometry import (ConstantPhi, CurveDomainError, LinearPhi, MonotoneCurve, PolylineCurve,
                       arc_element, sample_polyline)
from .moebius import Moebius, sup_sqrt_jacobian

__all__ = [
    "pointwise_bound",
    "omega_star",
    "lft_threshold",
    "interval_bound_state_threshold",
    "strip_ground_state",
    "ThresholdReport",
    "VerdictTag",
    "Verdict",
    "threshold_report",
    "classify",
    "arc_preimage",
]

GRID_POINTS = 10_000
GOLDEN_RTOL = 1e-10
LFT_SAMPLES = 4001


def pointwise_bound(curve: MonotoneCurve, r: float) -> float:
    """``1 / (2 pi r j(r))`` with ``j`` the arc-length element."""
    return 1.0 / (2.0 * math.pi * r * arc_element(curve, r))


def _bound_closed(curve: MonotoneCurve, r):
    # evaluation on the closed range, used for the infimum search
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        # the bound is 0 where phi' blows up (e.g. the semicircle tip)
        return 1.0 / (2.0 * np.pi * r * curve.arc_elements(r))


def _golden_min(f, a: float, b: float, rtol: float = GOLDEN_RTOL, maxiter: int = 200):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = b - invphi * (b - a), a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(maxiter):
        if abs(b - a) <= rtol * max(abs(a), abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _search_grid(R: float, n: int = GRID_POINTS) -> np.ndarray:
    # geometric near r = 0 where the bound blows up, uniform over the rest
    n_log = n // 4
    small = R * np.geomspace(1e-8, 1e-2, n_log, endpoint=False)
    rest = R * np.linspace(1e-2, 1.0, n - n_log)
    return np.concatenate([small, rest])


def omega_star(curve: MonotoneCurve) -> float:
    """Infimum over ``0 < r < R`` of the pointwise bound.

    Constant and linear profiles give a bound decreasing in ``r``, so the
    infimum is the limit at ``r = R``.  Other profiles are searched on a
    grid, and every local minimum is refined by golden-section search.
    """
    if not curve.bounded:
        raise CurveDomainError("the threshold of an unbounded curve is zero; truncate it first")
    R = curve.extent
    if isinstance(curve.phi, ConstantPhi):
        return 1.0 / (2.0 * math.pi * R)
    if isinstance(curve.phi, LinearPhi):
        return 1.0 / (2.0 * math.pi * R * math.hypot(1.0, R * curve.phi.slope))
    r = _search_grid(R)
    vals = _bound_closed(curve, r)
    if not np.all(np.isfinite(vals)):
        raise ValueError("pointwise bound is not finite on the search grid")
    best = float(np.min(vals))
    interior = np.flatnonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:])) + 1
    f = lambda x: float(_bound_closed(curve, x))
    for i in interior:
        _, fx = _golden_min(f, r[i - 1], r[i + 1])
        best = min(best, fx)
    if vals[-1] <= vals[-2]:
        _, fx = _golden_min(f, r[-2], R)
        best = min(best, fx)
    return best


def lft_threshold(gamma_star: float, M: Moebius, poly_gamma: PolylineCurve) -> float:
    """Threshold of ``Lambda = M(Gamma)`` from the threshold of ``Gamma``.

    ``gamma_star / sup sqrt(J_M)`` with the supremum taken over ``poly_gamma``.
    """
    return gamma_star / sup_sqrt_jacobian(M, poly_gamma)


def interval_bound_state_threshold(L: float) -> float:
    """Strength above which a segment of length ``L`` has a bound state."""
    if not L > 0:
        raise ValueError("L must be positive")
    return math.pi / (2.0 * L)


def strip_ground_state(L: float, omega: float) -> float:
    """``pi^2 / L^2 - 4 omega^2``: the bottom of the strip comparison operator.

    Negative values of ``omega`` carry no bound state of the line factor,
    so they are clamped to zero.
    """
    if not L > 0:
        raise ValueError("L must be positive")
    w = max(float(omega), 0.0)
    return math.pi ** 2 / L ** 2 - 4.0 * w * w


@dataclass(frozen=True)
class ThresholdReport:
    radii: np.ndarray
    pointwise: np.ndarray
    omega_star: float
    provenance: str = "direct"           # "direct" or "lft"
    sup_sqrt_jacobian: Optional[float] = None

    def __post_init__(self):
        if not (0 < self.omega_star < math.inf):
            raise ValueError("omega_star must be positive and finite")


def threshold_report(curve: MonotoneCurve, moebius: Optional[Moebius] = None,
                     n_table: int = 64) -> ThresholdReport:
    """Tabulated pointwise bound plus the threshold, optionally through an LFT.

    With ``moebius`` the curve is the monotone preimage ``Gamma`` and the
    threshold refers to its image.
    """
    R = curve.extent
    radii = R * np.arange(1, n_table + 1) / (n_table + 1)
    table = _bound_closed(curve, radii)
    gstar = omega_star(curve)
    if moebius is None:
        return ThresholdReport(radii, table, gstar)
    poly = sample_polyline(curve, LFT_SAMPLES, include_endpoints=True)
    sup = sup_sqrt_jacobian(moebius, poly)
    return ThresholdReport(radii, table, gstar / sup, provenance="lft", sup_sqrt_jacobian=sup)


def arc_preimage(R: float, eps: float) -> Tuple[MonotoneCurve, Moebius]:
    """Segment ``Gamma`` and ``M(z) = 1/z`` with ``M(Gamma)`` the arc
    ``(R sin t, R (1 - cos t))``, ``eps < t < 2 pi - eps``.

    The arc lies on the circle of radius ``R`` through the origin; inversion
    sends it to the horizontal segment ``y = -1/(2R)``, ``|x| < cot(eps/2)/(2R)``.
    """
    if not R > 0 or not 0 < eps < math.pi:
        raise ValueError("need R > 0 and 0 < eps < pi")
    half = 1.0 / (math.tan(0.5 * eps) * 2.0 * R)
    gamma = MonotoneCurve((-half, -0.5 / R), 2.0 * half, ConstantPhi(0.0))
    return gamma, Moebius.reciprocal()


class VerdictTag(enum.Enum):
    PROVABLY_NONNEGATIVE = "ProvablyNonnegative"
    BOUND_STATE_EXISTS = "BoundStateExists"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    tag: VerdictTag
    witness: Optional[float] = None

    def __str__(self):
        return self.tag.value


def _is_interval(curve: MonotoneCurve) -> bool:
    return isinstance(curve.phi, ConstantPhi)


def classify(curve: MonotoneCurve, omega: float, moebius: Optional[Moebius] = None) -> Verdict:
    """Three-valued verdict for a constant strength ``omega``.

    Non-negativity is certified when ``omega`` is at most the applicable
    threshold.  A bound state is asserted only for a straight segment above
    ``pi / (2 L)``; everything else is left open.
    """
    if moebius is None:
        star = omega_star(curve)
    else:
        star = threshold_report(curve, moebius).omega_star
    if omega <= star:
        return Verdict(VerdictTag.PROVABLY_NONNEGATIVE, star)
    if moebius is None and _is_interval(curve):
        upper = interval_bound_state_threshold(curve.extent)
        if omega > upper:
            return Verdict(VerdictTag.BOUND_STATE_EXISTS, upper)
    return Verdict(VerdictTag.UNKNOWN, star)
