"""Lowest eigenvalues of the discretized crack form and a numerical sign verdict."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..sparse_eig import smallest_eigenpairs
from .assembly import FormAssembly

NO_NEGATIVE = "NoNegativeFound"
NEGATIVE = "NegativeEigenvalue"

DIRECT_LABEL = "direct"
LFT_LABEL = "via LFT transport, eigenvalues not physical"


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    box: Tuple[float, float, float, float]
    h: float
    omega_nodes: np.ndarray
    verdict: str
    nonneg_tol: float
    residual_norms: np.ndarray
    label: str = DIRECT_LABEL
    ground_state: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    iterations: int = 0

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def sign_only(self) -> bool:
        return self.label != DIRECT_LABEL


def numeric_verdict(lambda1: float, nonneg_tol: float) -> str:
    return NEGATIVE if lambda1 < -nonneg_tol else NO_NEGATIVE


def lowest_eigenvalues(asm: FormAssembly, k: int = 1, tol: float = 1e-8, nonneg_tol: float = 1e-6,
                       preconditioner="amg", seed: int = 0, label: str = DIRECT_LABEL,
                       X0: Optional[np.ndarray] = None) -> SpectralReport:
    """``k`` smallest eigenvalues of ``(K - B) x = lam M x``.

    The ground state is returned as a nodal vector (Dirichlet nodes zero).
    The default preconditioner is an AMG cycle for ``K + M``.
    """
    res = smallest_eigenpairs(asm.K - asm.B, asm.M, k=k, tol=tol, preconditioner=preconditioner,
                              seed=seed, X0=X0)
    lam = np.asarray(res.eigenvalues, dtype=float)
    x = res.eigenvectors[:, 0]
    # fix the sign so the largest entry is positive
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    return SpectralReport(
        eigenvalues=lam, box=asm.mesh.box, h=asm.mesh.h, omega_nodes=asm.omega_nodes,
        verdict=numeric_verdict(float(lam[0]), nonneg_tol), nonneg_tol=nonneg_tol,
        residual_norms=np.asarray(res.residual_norms), label=label,
        ground_state=asm.extend(x), iterations=res.iterations)
