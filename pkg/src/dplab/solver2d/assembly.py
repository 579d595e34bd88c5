"""P1 finite-element discretization of the crack quadratic form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp

from ..sparse_eig import CsrMatrix
from .mesh import CrackMesh

OmegaProfile = Union[float, np.ndarray, Callable[[np.ndarray, np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class FormAssembly:
    """Stiffness ``K``, interface ``B`` and mass ``M`` on the free (non-Dirichlet) nodes.

    The discrete form is ``u^T (K - B) u`` with Gram matrix ``M``.
    """

    mesh: CrackMesh
    K: CsrMatrix
    B: CsrMatrix
    M: CsrMatrix
    free: np.ndarray          # node index of every unknown
    omega_nodes: np.ndarray   # strength at the crack nodes
    boundary: str = "Dirichlet"

    @property
    def n(self) -> int:
        return self.K.n

    def restrict(self, u_nodes: np.ndarray) -> np.ndarray:
        """Nodal vector (all mesh nodes) to the unknown vector."""
        return np.asarray(u_nodes)[self.free]

    def extend(self, u: np.ndarray) -> np.ndarray:
        """Unknown vector to a nodal vector with zero Dirichlet values."""
        full = np.zeros(self.mesh.n_nodes)
        full[self.free] = u
        return full

    def energy(self, u: np.ndarray) -> float:
        return float(u @ (self.K @ u) - u @ (self.B @ u))


def omega_at_crack(mesh: CrackMesh, omega: OmegaProfile) -> np.ndarray:
    """Strength values at the crack nodes (tips included), left to right."""
    n_crack = mesh.crack_plus.size
    if callable(omega):
        xy = mesh.nodes[mesh.crack_plus]
        values = np.broadcast_to(np.asarray(omega(xy[:, 0], xy[:, 1]), dtype=float), (n_crack,))
    elif np.ndim(omega) == 0:
        values = np.full(n_crack, float(omega))
    else:
        values = np.asarray(omega, dtype=float)
        if values.shape != (n_crack,):
            raise ValueError(f"omega profile has {values.size} values, crack has {n_crack} nodes")
    if not np.all(np.isfinite(values)):
        raise ValueError("omega profile must be finite")
    return np.array(values, dtype=float)


def crack_jump_weights(mesh: CrackMesh, omega: OmegaProfile) -> np.ndarray:
    """Trapezoid weights ``w_c`` with ``int omega [u]^2 ds ~ sum_c w_c [u]_c^2``."""
    w = omega_at_crack(mesh, omega)
    lengths = np.full(mesh.crack_plus.size, mesh.h)
    lengths[0] = lengths[-1] = 0.5 * mesh.h
    return w * lengths


def _element_matrices(nodes, triangles):
    p = nodes[triangles]                    # (t, 3, 2)
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    # gradients of barycentric coordinates: rotate opposite edges
    opp = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    grads = np.stack([-opp[..., 1], opp[..., 0]], axis=-1) / (2.0 * area[:, None, None])
    Ke = area[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)
    Me = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    return Ke, Me


def assemble(mesh: CrackMesh, omega: OmegaProfile = 0.0) -> FormAssembly:
    """Assemble ``K`` (exact P1 stiffness), ``M`` (consistent mass) and the
    interface matrix ``B`` from trapezoid-rule jump integrals.

    ``omega`` is a constant, an array over the crack nodes (tips included)
    or a callable ``omega(x, y)``.  Dirichlet nodes are eliminated.
    """
    omega_nodes = omega_at_crack(mesh, omega)
    n_nodes = mesh.n_nodes
    free = np.flatnonzero(~mesh.boundary)
    dof = np.full(n_nodes, -1)
    dof[free] = np.arange(free.size)

    Ke, Me = _element_matrices(mesh.nodes, mesh.triangles)
    tri = dof[mesh.triangles]
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    keep = (rows >= 0) & (cols >= 0)
    shape = (free.size, free.size)
    K = sp.coo_matrix((Ke.ravel()[keep], (rows[keep], cols[keep])), shape=shape).tocsr()
    M = sp.coo_matrix((Me.ravel()[keep], (rows[keep], cols[keep])), shape=shape).tocsr()

    weights = crack_jump_weights(mesh, omega_nodes)[1:-1]
    p = dof[mesh.crack_plus[1:-1]]
    q = dof[mesh.crack_minus[1:-1]]
    B = sp.coo_matrix(
        (np.concatenate([weights, weights, -weights, -weights]),
         (np.concatenate([p, q, p, q]), np.concatenate([p, q, q, p]))),
        shape=shape).tocsr()

    return FormAssembly(mesh=mesh, K=CsrMatrix.from_scipy(K), B=CsrMatrix.from_scipy(B),
                        M=CsrMatrix.from_scipy(M), free=free, omega_nodes=omega_nodes)
