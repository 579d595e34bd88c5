"""Crack problems on a segment obtained by pulling a curve back through an LFT.

The pulled-back form has the same sign as the original one but different
eigenvalues, so reports produced here carry the sign-only label.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..geometry import ConstantPhi, MonotoneCurve, PolylineCurve
from ..moebius import Moebius, Strength, pullback_strength
from .assembly import assemble
from .mesh import Box, build_crack_mesh
from .spectrum import LFT_LABEL, SpectralReport, lowest_eigenvalues


def segment_of(curve: MonotoneCurve):
    """``(x_a, x_b, y0)`` for a horizontal straight monotone curve."""
    if not isinstance(curve.phi, ConstantPhi) or curve.phi.angle != 0.0:
        raise ValueError("the preimage must be a horizontal segment pointing in +x")
    x0, y0 = curve.origin
    return x0, x0 + curve.extent, y0


def lft_pullback_spectrum(M: Moebius, gamma: MonotoneCurve, omega: Strength, box: Box, h: float,
                          k: int = 1, tol: float = 1e-8, nonneg_tol: float = 1e-6,
                          seed: int = 0, n_samples: Optional[int] = None) -> SpectralReport:
    """Ground state of the segment problem with strength ``omega(M(z)) sqrt(J_M(z))``.

    ``gamma`` is the horizontal segment ``M^{-1}(Lambda)``; ``omega`` is the
    strength on ``Lambda`` (constant or callable of ``(x, y)``).
    """
    mesh = build_crack_mesh(box, h, segment_of(gamma))
    xa, xb, y0 = mesh.segment
    # tabulate the pulled-back strength exactly at the crack nodes
    xs = mesh.crack_x if n_samples is None else np.linspace(xa, xb, n_samples)
    poly = PolylineCurve(np.column_stack([xs, np.full(xs.size, y0)]))
    table = pullback_strength(M, poly, omega)
    omega_nodes = table.at_x(mesh.crack_x)
    asm = assemble(mesh, omega_nodes)
    return lowest_eigenvalues(asm, k=k, tol=tol, nonneg_tol=nonneg_tol, seed=seed, label=LFT_LABEL)


def arc_polyline(R: float, eps: float, n: int) -> PolylineCurve:
    """Vertices of the arc ``(R sin t, R (1 - cos t))``, ``eps <= t <= 2 pi - eps``."""
    t = np.linspace(eps, 2.0 * np.pi - eps, n)
    return PolylineCurve(np.column_stack([R * np.sin(t), R * (1.0 - np.cos(t))]))

