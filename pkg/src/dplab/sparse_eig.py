"""Symmetric sparse linear algebra.

CSR storage, conjugate gradients, a blocked locally optimal eigensolver
for the generalized problem ``K x = lam M x`` and a dense oracle used by
the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp

__all__ = [
    "CsrMatrix",
    "EigResult",
    "LinearSolverError",
    "EigensolverError",
    "matvec",
    "cg_solve",
    "smallest_eigenpairs",
    "dense_eig_oracle",
    "jacobi_preconditioner",
    "amg_preconditioner",
]

SYMMETRY_RTOL = 1e-12


class LinearSolverError(RuntimeError):
    """Raised when conjugate gradients fail to reach the requested tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class EigensolverError(RuntimeError):
    """Raised when the block eigensolver breaks down or does not converge."""

    def __init__(self, message: str, residual_norms: Optional[np.ndarray] = None):
        super().__init__(message)
        self.residual_norms = residual_norms


@dataclass(frozen=True)
class CsrMatrix:
    """Square symmetric matrix in compressed sparse row form.

    The full pattern is stored (both triangles).  Construction validates
    the CSR invariants and symmetry of the values.
    """

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    _scipy: sp.csr_matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        row_ptr = np.asarray(self.row_ptr, dtype=np.int64)
        col_idx = np.asarray(self.col_idx, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        n = int(self.n)
        if row_ptr.shape != (n + 1,) or row_ptr[0] != 0:
            raise ValueError("row_ptr must have length n + 1 and start at 0")
        if np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must be non-decreasing")
        if row_ptr[-1] != col_idx.size or col_idx.size != values.size:
            raise ValueError("row_ptr, col_idx and values are inconsistent")
        if col_idx.size and (col_idx.min() < 0 or col_idx.max() >= n):
            raise ValueError("column index out of range")
        A = sp.csr_matrix((values, col_idx, row_ptr), shape=(n, n))
        if not A.has_sorted_indices:
            raise ValueError("column indices must be sorted within each row")
        _check_symmetric(A)
        for arr in (row_ptr, col_idx, values):
            arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_scipy", A)

    @classmethod
    def from_scipy(cls, A) -> "CsrMatrix":
        A = sp.csr_matrix(A, dtype=float)
        A.sum_duplicates()
        A.sort_indices()
        return cls(A.shape[0], A.indptr, A.indices, A.data)

    @classmethod
    def from_dense(cls, A) -> "CsrMatrix":
        return cls.from_scipy(sp.csr_matrix(np.asarray(A, dtype=float)))

    @property
    def shape(self):
        return (self.n, self.n)

    def to_scipy(self) -> sp.csr_matrix:
        return self._scipy

    def toarray(self) -> np.ndarray:
        return self._scipy.toarray()

    def diagonal(self) -> np.ndarray:
        return self._scipy.diagonal()

    def norm(self) -> float:
        """Max absolute row sum, an upper bound of the spectral norm."""
        if self.values.size == 0:
            return 0.0
        return float(np.max(np.abs(self._scipy).sum(axis=1)))

    def __matmul__(self, x):
        return matvec(self, x)

    def __add__(self, other: "CsrMatrix") -> "CsrMatrix":
        return CsrMatrix.from_scipy(self._scipy + other.to_scipy())

    def __sub__(self, other: "CsrMatrix") -> "CsrMatrix":
        return CsrMatrix.from_scipy(self._scipy - other.to_scipy())

    def scaled(self, alpha: float) -> "CsrMatrix":
        return CsrMatrix(self.n, self.row_ptr, self.col_idx, alpha * self.values)


def _check_symmetric(A: sp.csr_matrix):
    D = (A - A.T).tocsr()
    D.eliminate_zeros()
    if D.nnz == 0:
        return
    scale = max(np.max(np.abs(A.data)), 1e-300)
    if np.max(np.abs(D.data)) > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric")


def _as_operator(A):
    if isinstance(A, CsrMatrix):
        return A.to_scipy()
    return A


def matvec(A: CsrMatrix, x) -> np.ndarray:
    """Return ``A @ x`` for a vector or a block of column vectors."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != A.n:
        raise ValueError(f"dimension mismatch: matrix is {A.n}x{A.n}, vector has {x.shape[0]} rows")
    return A.to_scipy() @ x


def cg_solve(A: CsrMatrix, b, tol: float = 1e-10, maxiter: Optional[int] = None,
             x0=None) -> np.ndarray:
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    Stops once ``||A x - b|| <= tol * ||b||``.  Raises
    :class:`LinearSolverError` on non-convergence or when a search direction
    with non-positive curvature shows that ``A`` is not positive definite.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (A.n,):
        raise ValueError("right-hand side has the wrong shape")
    if maxiter is None:
        maxiter = 10 * A.n
    bnorm = np.linalg.norm(b)
    x = np.zeros(A.n) if x0 is None else np.array(x0, dtype=float)
    if bnorm == 0.0:
        return np.zeros(A.n)
    r = b - matvec(A, x)
    p = r.copy()
    rr = r @ r
    target = tol * bnorm
    for it in range(maxiter + 1):
        if np.sqrt(rr) <= target:
            return x
        if it == maxiter:
            break
        Ap = matvec(A, p)
        curvature = p @ Ap
        if curvature <= 0.0:
            raise LinearSolverError(
                f"non-positive curvature {curvature:.3e} at iteration {it}: matrix is not SPD",
                residual=float(np.sqrt(rr) / bnorm), iterations=it)
        alpha = rr / curvature
        x += alpha * p
        r -= alpha * Ap
        rr_new = r @ r
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise LinearSolverError(
        f"CG did not converge in {maxiter} iterations (relative residual {np.sqrt(rr) / bnorm:.3e})",
        residual=float(np.sqrt(rr) / bnorm), iterations=maxiter)


@dataclass(frozen=True)
class EigResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray
    iterations: int = 0


Preconditioner = Callable[[np.ndarray], np.ndarray]


def jacobi_preconditioner(A: CsrMatrix, B: Optional[CsrMatrix] = None) -> Preconditioner:
    """Diagonal scaling by ``|diag(A)| + diag(B)``.

    Adding the mass diagonal keeps the scaling bounded when ``A`` is
    indefinite with small diagonal entries.
    """
    d = np.abs(A.diagonal()).astype(float)
    if B is not None:
        d = d + np.abs(B.diagonal())
    d[d == 0.0] = 1.0
    inv = 1.0 / d
    return lambda R: R * inv[:, None] if R.ndim == 2 else R * inv


def amg_preconditioner(S: CsrMatrix) -> Preconditioner:
    """Smoothed-aggregation AMG V-cycle approximating ``S^{-1}`` (S must be SPD)."""
    import pyamg

    # pyamg estimates spectral radii from the global numpy RNG; pin it so the
    # hierarchy (and every eigenvalue downstream) is reproducible
    state = np.random.get_state()
    np.random.seed(0)
    try:
        ml = pyamg.smoothed_aggregation_solver(S.to_scipy(), symmetry="symmetric")
    finally:
        np.random.set_state(state)
    M = ml.aspreconditioner(cycle="V")
    return lambda R: M @ R


def _counter_block(n: int, m: int, seed: int) -> np.ndarray:
    # counter-based generator: bit-reproducible for a given (seed, n, m)
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.standard_normal((n, m))


def _b_orthonormal_basis(S, BS, drop_tol):
    """Return coefficients Q with ``(S Q)^T B (S Q) = I``, dropping near-dependent directions."""
    G = S.T @ BS
    G = 0.5 * (G + G.T)
    scale = np.sqrt(np.abs(np.diag(G)))
    scale[scale == 0.0] = 1.0
    Gs = G / np.outer(scale, scale)
    w, V = np.linalg.eigh(Gs)
    keep = w > drop_tol * max(w[-1], 0.0)
    if not np.any(keep):
        return None
    Q = (V[:, keep] / np.sqrt(w[keep])) / scale[:, None]
    return Q


def _orthonormalize_against(V, BV, bases, drop_tol=1e-10):
    """B-orthogonalize ``V`` against B-orthonormal blocks, then B-orthonormalize it.

    Two passes of block Gram-Schmidt keep the basis orthogonal to working
    precision, so the Rayleigh-Ritz Gram matrix stays close to the identity.
    Returns ``(V, BV, Q)`` with ``Q`` the coefficient map, or ``None``.
    """
    for _ in range(2):
        for Y, BY in bases:
            C = BY.T @ V
            V = V - Y @ C
            BV = BV - BY @ C
        Q = _b_orthonormal_basis(V, BV, drop_tol)
        if Q is None:
            return None
        V, BV = V @ Q, BV @ Q
    return V, BV


def _lobpcg(A, B, X, k, tol, maxiter, T):
    n, m = X.shape
    BX = B @ X
    out = _orthonormalize_against(X, BX, [], 1e-14)
    if out is None or out[0].shape[1] < m:
        raise EigensolverError("initial block is rank deficient")
    X, BX = out
    AX = A @ X
    lam, C = np.linalg.eigh(0.5 * (X.T @ AX + (X.T @ AX).T))
    X, AX, BX = X @ C, AX @ C, BX @ C
    P = AP = BP = None
    res = np.full(m, np.inf)
    for it in range(1, maxiter + 1):
        R = AX - BX * lam
        res = np.linalg.norm(R, axis=0) / np.linalg.norm(X, axis=0)
        if np.all(res[:k] <= tol):
            return lam[:k], X[:, :k], res[:k], it
        # soft locking: converged columns stop contributing search directions
        active = res > tol
        W = T(R[:, active])
        out = _orthonormalize_against(W, B @ W, [(X, BX)])
        if out is None:
            raise EigensolverError(f"search directions collapsed at iteration {it}", res)
        W, BW = out
        AW = A @ W
        blocks = [(X, AX, BX), (W, AW, BW)]
        if P is not None and P.shape[1] > 0:
            out = _orthonormalize_against(P, BP, [(X, BX), (W, BW)])
            if out is not None:
                # A P follows from the same linear combinations
                Pn, BPn = out
                AP = A @ Pn
                blocks.append((Pn, AP, BPn))
        S = np.hstack([b[0] for b in blocks])
        AS = np.hstack([b[1] for b in blocks])
        BS = np.hstack([b[2] for b in blocks])
        H = S.T @ AS
        G = S.T @ BS
        try:
            theta, Y = scipy.linalg.eigh(0.5 * (H + H.T), 0.5 * (G + G.T))
        except np.linalg.LinAlgError as exc:
            raise EigensolverError(f"Rayleigh-Ritz failed at iteration {it}: {exc}", res) from exc
        if not np.all(np.isfinite(theta)):
            raise EigensolverError(f"non-finite Ritz values at iteration {it}", res)
        Y = Y[:, :m]
        Xn, AXn, BXn = S @ Y, AS @ Y, BS @ Y
        # next search direction: the update without its component in the old block
        nx = X.shape[1]
        Yp = Y.copy()
        Yp[:nx] = 0.0
        P, AP, BP = S @ Yp, AS @ Yp, BS @ Yp
        P, AP, BP = P[:, active], AP[:, active], BP[:, active]
        X, AX, BX, lam = Xn, AXn, BXn, theta[:m]
        if it % 25 == 0:
            # refresh products to stop drift in the recurrences
            AX, BX = A @ X, B @ X
    raise EigensolverError(
        f"no convergence in {maxiter} iterations (max residual {np.max(res[:k]):.3e})", res[:k])


def smallest_eigenpairs(K: CsrMatrix, M: CsrMatrix, k: int = 1, tol: float = 1e-8,
                        preconditioner: Union[None, str, Preconditioner] = "jacobi",
                        maxiter: int = 5000, seed: int = 0, guard: Optional[int] = None,
                        X0: Optional[np.ndarray] = None) -> EigResult:
    """Smallest ``k`` eigenpairs of the pencil ``K x = lam M x``.

    Blocked locally optimal preconditioned iteration.  ``K`` is symmetric
    (possibly indefinite), ``M`` symmetric positive definite.  Convergence
    means ``||K x - lam M x|| / ||x|| <= tol`` for every returned pair.
    On breakdown the iteration is restarted once from a fresh random block.
    """
    if not 1 <= k <= 10:
        raise ValueError("k must be between 1 and 10")
    if K.n != M.n:
        raise ValueError("K and M have different dimensions")
    n = K.n
    if guard is None:
        guard = min(k, 3) + 1
    m = min(n, k + guard)
    if m < k:
        raise ValueError("k exceeds the problem dimension")
    A, B = _as_operator(K), _as_operator(M)
    if preconditioner is None:
        T = lambda R: R
    elif preconditioner == "jacobi":
        T = jacobi_preconditioner(K, M)
    elif preconditioner == "amg":
        T = amg_preconditioner(K + M)
    elif callable(preconditioner):
        T = preconditioner
    else:
        raise ValueError(f"unknown preconditioner {preconditioner!r}")

    if n <= 3 * m:
        # too small for a block iteration; the pencil fits in memory
        lam, V = scipy.linalg.eigh(K.toarray(), M.toarray())
        V = V[:, :k]
        res = np.linalg.norm(K.toarray() @ V - (M.toarray() @ V) * lam[:k], axis=0) / np.linalg.norm(V, axis=0)
        return EigResult(lam[:k], V, res, 0)

    start = _counter_block(n, m, seed)
    if X0 is not None:
        X0 = np.asarray(X0, dtype=float).reshape(n, -1)[:, :m]
        start[:, :X0.shape[1]] = X0
    try:
        lam, X, res, it = _lobpcg(A, B, start, k, tol, maxiter, T)
    except EigensolverError:
        lam, X, res, it = _lobpcg(A, B, _counter_block(n, m, seed + 1), k, tol, maxiter, T)
    return EigResult(np.asarray(lam), X, np.asarray(res), it)


def dense_eig_oracle(A, B=None) -> np.ndarray:
    """All eigenvalues of the dense symmetric pencil ``(A, B)``, ascending.

    Reduces to standard form with the Cholesky factor of ``B`` and solves
    the symmetric problem by tridiagonalization and implicit-shift QR.
    """
    A = np.asarray(A.toarray() if hasattr(A, "toarray") else A, dtype=float)
    if A.shape[0] > 2000:
        raise ValueError("dense oracle is limited to n <= 2000")
    if B is None:
        C = A
    else:
        B = np.asarray(B.toarray() if hasattr(B, "toarray") else B, dtype=float)
        try:
            L = np.linalg.cholesky(B)
        except np.linalg.LinAlgError as exc:
            raise ValueError("B is not symmetric positive definite") from exc
        Y = scipy.linalg.solve_triangular(L, A, lower=True)
        C = scipy.linalg.solve_triangular(L, Y.T, lower=True).T
    C = 0.5 * (C + C.T)
    return np.sort(scipy.linalg.eigh(C, eigvals_only=True, driver="ev"))
