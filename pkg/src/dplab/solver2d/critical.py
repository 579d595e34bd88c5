"""Bisection for the strength at which a segment first binds a state."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .assembly import assemble
from .mesh import Box, build_crack_mesh
from .spectrum import lowest_eigenvalues


class MonotonicityError(RuntimeError):
    """Ground-state energies that increase with the strength (solver tolerance too loose)."""


@dataclass(frozen=True)
class CriticalBracket:
    """Discretization-dependent bracket for the critical strength of a segment.

    The bracket refers to one mesh; it is an estimate, not the continuum value.
    """

    omega_lo: float
    omega_hi: float
    lambda_lo: float
    lambda_hi: float
    h: float
    box: Box
    samples: Tuple[Tuple[float, float], ...]

    @property
    def width(self) -> float:
        return self.omega_hi - self.omega_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.omega_lo + self.omega_hi)


def _check_monotone(samples: List[Tuple[float, float]], slack: float):
    s = sorted(samples)
    lam = np.array([v for _, v in s])
    if np.any(np.diff(lam) > slack):
        i = int(np.argmax(np.diff(lam)))
        raise MonotonicityError(
            f"lambda1 increases from {lam[i]:.3e} at omega={s[i][0]:.6g} "
            f"to {lam[i + 1]:.3e} at omega={s[i + 1][0]:.6g}")


def estimate_critical_strength(L: float = 1.0, box: Box = (-3.0, 4.0, -3.0, 3.0), h: float = 1 / 32,
                               tol_omega: float = 0.05, origin=(0.0, 0.0), tol: float = 1e-8,
                               nonneg_tol: float = 1e-6, seed: int = 0) -> CriticalBracket:
    """Bisect the sign of the ground-state energy in the strength.

    Starts from ``[1/(2 pi L), pi/(2 L)]``, where the left end is provably
    non-negative and the right end provably binds a state, and halves until
    the bracket is at most ``tol_omega`` wide.
    """
    if not L > 0:
        raise ValueError("L must be positive")
    if not tol_omega > 0:
        raise ValueError("tol_omega must be positive")
    x0, y0 = map(float, origin)
    mesh = build_crack_mesh(box, h, (x0, x0 + L, y0))
    samples: List[Tuple[float, float]] = []

    def ground(omega):
        # fresh seeded start each time: a warm start from the even (jump-free)
        # mode can hide the odd mode that crosses zero
        rep = lowest_eigenvalues(assemble(mesh, omega), k=1, tol=tol, nonneg_tol=nonneg_tol,
                                 seed=seed)
        samples.append((omega, rep.lambda1))
        _check_monotone(samples, 10 * nonneg_tol)
        return rep.lambda1

    lo, hi = 1.0 / (2.0 * math.pi * L), math.pi / (2.0 * L)
    lam_lo, lam_hi = ground(lo), ground(hi)
    if lam_lo < -nonneg_tol:
        raise MonotonicityError(f"lambda1 = {lam_lo:.3e} < 0 at the provable lower threshold")
    if lam_hi >= -nonneg_tol:
        raise MonotonicityError(f"no negative eigenvalue at the upper threshold (lambda1 = {lam_hi:.3e}); "
                                "enlarge the box or refine the mesh")
    while hi - lo > tol_omega:
        mid = 0.5 * (lo + hi)
        lam = ground(mid)
        if lam < -nonneg_tol:
            hi, lam_hi = mid, lam
        else:
            lo, lam_lo = mid, lam
    return CriticalBracket(lo, hi, lam_lo, lam_hi, mesh.h, mesh.box, tuple(samples))
