"""Point interaction with jump coupling on a loop of length ``d`` and on the line.

The loop model is ``-psi''`` on ``(0, d)`` with the end conditions
``psi'(0+) = psi'(d-) = omega (psi(d) - psi(0))``.  Its quadratic form is

    a[psi] = ||psi'||^2 - omega |psi(d) - psi(0)|^2,

and a negative eigenvalue ``-kappa^2`` exists exactly when the secular
function ``theta(kappa) = (2 omega / kappa) tanh(kappa d / 2)`` equals one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .sparse_eig import CsrMatrix, smallest_eigenpairs

__all__ = [
    "LoopSpec",
    "Spectrum1D",
    "theta",
    "loop_negative_eigenvalues",
    "loop_fe_matrices",
    "loop_fe_spectrum",
    "line_delta_prime_eigenvalue",
    "line_fe_ground_state",
]

ROOT_TOL = 1e-12


@dataclass(frozen=True)
class LoopSpec:
    d: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d > 0):
            raise ValueError("loop length d must be positive and finite")
        if not math.isfinite(self.omega):
            raise ValueError("omega must be finite")

    @property
    def coupling(self) -> float:
        """The dimensionless product ``d * omega`` that decides the dichotomy."""
        return self.d * self.omega


@dataclass(frozen=True)
class Spectrum1D:
    eigenvalues: np.ndarray
    method: str                     # "transcendental" or "fe"
    n: Optional[int] = None         # cells, for the finite-element method
    residual_norms: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        lam = np.sort(np.asarray(self.eigenvalues, dtype=float))
        object.__setattr__(self, "eigenvalues", lam)
        if self.method == "transcendental" and np.any(lam >= 0):
            raise ValueError("transcendental spectra list only negative eigenvalues")

    def __len__(self):
        return self.eigenvalues.size

    @property
    def lowest(self) -> Optional[float]:
        return float(self.eigenvalues[0]) if self.eigenvalues.size else None


def theta(spec: LoopSpec, kappa):
    """Secular function ``(2 omega / kappa) (1 - e^{-kappa d}) / (1 + e^{-kappa d})``."""
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0):
        raise ValueError("kappa must be positive")
    # (1 - e^-x) / (1 + e^-x) = tanh(x / 2), stable for all x > 0
    out = 2.0 * spec.omega / kappa * np.tanh(0.5 * kappa * spec.d)
    return float(out) if out.ndim == 0 else out


def _bisect_root(spec: LoopSpec, lo: float, hi: float, tol: float = ROOT_TOL) -> float:
    """Root of ``theta - 1`` on ``[lo, hi]`` where ``theta(lo) > 1 > theta(hi)``."""
    g = lambda k: theta(spec, k) - 1.0
    glo, ghi = g(lo), g(hi)
    if ghi == 0.0:
        # tanh rounds to 1 for large omega d; the root is then hi to machine precision
        return hi
    if not (glo > 0 > ghi):
        raise ValueError("bracket does not enclose a sign change")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol or mid in (lo, hi):
            return mid
        if gm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def loop_negative_eigenvalues(spec: LoopSpec) -> Spectrum1D:
    """Negative spectrum of the loop model from the secular equation.

    Empty when ``d * omega <= 1``; otherwise the single eigenvalue
    ``-kappa^2`` with ``theta(kappa) = 1``.  Since ``theta`` decreases from
    ``d omega`` at ``0+`` and ``theta(2 omega) = tanh(omega d) < 1``, the
    bracket ``(eps, 2 omega]`` always contains the root.
    """
    if spec.coupling <= 1.0:
        return Spectrum1D(np.empty(0), "transcendental")
    w = spec.omega
    kappa = _bisect_root(spec, 1e-14 * w, 2.0 * w)
    return Spectrum1D(np.array([-kappa * kappa]), "transcendental")


def _p1_blocks(n: int, h: float):
    """Tridiagonal P1 stiffness and consistent mass on ``n`` uniform cells."""
    main_k = np.full(n + 1, 2.0 / h)
    main_k[[0, -1]] = 1.0 / h
    off_k = np.full(n, -1.0 / h)
    main_m = np.full(n + 1, 4.0 * h / 6.0)
    main_m[[0, -1]] = 2.0 * h / 6.0
    off_m = np.full(n, h / 6.0)
    return (main_k, off_k), (main_m, off_m)


def loop_fe_matrices(spec: LoopSpec, n: int) -> Tuple[CsrMatrix, CsrMatrix]:
    """Stiffness-minus-coupling and mass matrices of the loop form.

    The coupling ``-omega (psi(d) - psi(0))^2`` adds a rank-one update to
    the four corner entries of the tridiagonal stiffness.
    """
    if n < 16:
        raise ValueError("need at least 16 cells")
    h = spec.d / n
    (mk, ok), (mm, om) = _p1_blocks(n, h)
    K = sp.diags([ok, mk, ok], [-1, 0, 1], format="lil")
    w = spec.omega
    K[0, 0] -= w
    K[n, n] -= w
    K[0, n] += w
    K[n, 0] += w
    M = sp.diags([om, mm, om], [-1, 0, 1], format="csr")
    return CsrMatrix.from_scipy(K.tocsr()), CsrMatrix.from_scipy(M)


def _tridiagonal_inverse(A: sp.spmatrix):
    """Banded Cholesky solve with an SPD tridiagonal matrix (used as preconditioner)."""
    A = sp.csr_matrix(A)
    ab = np.zeros((2, A.shape[0]))
    ab[0, 1:] = A.diagonal(1)
    ab[1] = A.diagonal()
    cb = scipy.linalg.cholesky_banded(ab)
    return lambda R: scipy.linalg.cho_solve_banded((cb, False), R)


def _p1_tridiagonal(n: int, h: float, shift: float) -> sp.spmatrix:
    (mk, ok), (mm, om) = _p1_blocks(n, h)
    return sp.diags([ok + shift * om, mk + shift * mm, ok + shift * om], [-1, 0, 1])


def _coupled_shifted_inverse(spec: LoopSpec, n: int):
    """Exact inverse of ``K + s M`` with ``s = 4 max(omega, 0)^2 + 1``.

    The continuous ground state lies above ``-4 omega^2`` and the Galerkin
    values lie above it, so the shifted matrix is SPD.  The rank-one corner
    coupling is handled by Sherman-Morrison on top of a banded solve.
    """
    shift = 4.0 * max(spec.omega, 0.0) ** 2 + 1.0
    solve = _tridiagonal_inverse(_p1_tridiagonal(n, spec.d / n, shift))
    u = np.zeros(n + 1)
    u[0], u[-1] = -1.0, 1.0
    Tu = solve(u)
    denom = 1.0 - spec.omega * (u @ Tu)

    def apply(R):
        Y = solve(R)
        return Y + np.multiply.outer(Tu, spec.omega * (u @ Y) / denom)

    return apply


def loop_fe_spectrum(spec: LoopSpec, n: int = 2048, k: int = 1, tol: float = 1e-9,
                     seed: int = 0) -> Spectrum1D:
    """``k`` smallest eigenvalues of the P1 discretization of the loop form."""
    if k < 1:
        raise ValueError("k must be positive")
    K, M = loop_fe_matrices(spec, n)
    res = smallest_eigenpairs(K, M, k=k, tol=tol, preconditioner=_coupled_shifted_inverse(spec, n),
                              seed=seed)
    return Spectrum1D(res.eigenvalues, "fe", n=n, residual_norms=res.residual_norms)


def line_delta_prime_eigenvalue(omega: float) -> Optional[float]:
    """Bound state ``-4 omega^2`` of the jump coupling at one point of the line.

    Returns ``None`` when ``omega <= 0`` (no bound state).
    """
    if omega <= 0:
        return None
    return -4.0 * omega * omega


def line_fe_ground_state(omega: float, half_width: float = 20.0, h: float = 0.01,
                         tol: float = 1e-9) -> float:
    """Lowest eigenvalue of the line model truncated to ``(-a, a)`` (Dirichlet ends).

    The origin carries two nodes, one for each side, coupled by
    ``-omega (psi(0+) - psi(0-))^2``.
    """
    m = int(round(half_width / h))
    if m < 16 or abs(m * h - half_width) > 1e-9 * half_width:
        raise ValueError("half_width must be a multiple of h with at least 16 cells")
    (mk, ok), (mm, om) = _p1_blocks(m, h)
    # each half line: nodes 0..m with the outer end removed
    K1 = sp.diags([ok, mk, ok], [-1, 0, 1], format="csr")
    M1 = sp.diags([om, mm, om], [-1, 0, 1], format="csr")
    left_K, left_M = K1[1:, 1:], M1[1:, 1:]      # last node is x = 0-
    right_K, right_M = K1[:-1, :-1], M1[:-1, :-1]  # first node is x = 0+
    K = sp.block_diag([left_K, right_K], format="lil")
    M = sp.block_diag([left_M, right_M], format="csr")
    T = _tridiagonal_inverse(K.tocsr() + M)
    p, q = m - 1, m
    K[p, p] -= omega
    K[q, q] -= omega
    K[p, q] += omega
    K[q, p] += omega
    res = smallest_eigenpairs(CsrMatrix.from_scipy(K.tocsr()), CsrMatrix.from_scipy(M), k=1,
                              tol=tol, preconditioner=T)
    return float(res.eigenvalues[0])
