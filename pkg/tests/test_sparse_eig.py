import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from dplab.sparse_eig import (CsrMatrix, EigensolverError, LinearSolverError, cg_solve, dense_eig_oracle,
                              matvec, smallest_eigenpairs)


def laplacian_1d(n):
    """Dirichlet (2, -1) / h^2 stencil on n interior points of (0, 1)."""
    h = 1.0 / (n + 1)
    A = sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]) / h ** 2
    return CsrMatrix.from_scipy(A), h


def fd_eigenvalues(n, k):
    h = 1.0 / (n + 1)
    j = np.arange(1, k + 1)
    return 2 / h ** 2 * (1 - np.cos(j * np.pi * h))


def random_symmetric(rng, n, density=0.1):
    A = sp.random(n, n, density=density, random_state=rng)
    return (A + A.T).toarray()


def test_identity_matvec():
    x = np.arange(7.0)
    np.testing.assert_array_equal(matvec(CsrMatrix.from_scipy(sp.eye(7)), x), x)


def test_laplacian_sine_vector():
    n = 200
    A, h = laplacian_1d(n)
    x = np.arange(1, n + 1) * h
    for k in (1, 3, 7):
        v = np.sin(k * np.pi * x)
        lam = fd_eigenvalues(n, k)[-1]
        # round-off is relative to |A| |v|: the stencil entries are O(1/h^2)
        np.testing.assert_allclose(matvec(A, v), lam * v, rtol=0, atol=1e-12 * A.norm())


def test_matvec_matches_dense():
    rng = np.random.default_rng(0)
    D = random_symmetric(rng, 100, 0.2)
    x = rng.standard_normal(100)
    assert np.max(np.abs(matvec(CsrMatrix.from_dense(D), x) - D @ x)) < 1e-12


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError):
        matvec(CsrMatrix.from_scipy(sp.eye(3)), np.ones(4))


def test_csr_validation():
    with pytest.raises(ValueError):
        CsrMatrix(2, [0, 1, 2], [0, 0], [1.0, 2.0])            # not symmetric
    with pytest.raises(ValueError):
        CsrMatrix(2, [0, 2, 3], [1, 0, 1], [1.0, 1.0, 1.0])    # unsorted row
    with pytest.raises(ValueError):
        CsrMatrix(2, [0, 2, 1], [0, 1], [1.0, 1.0])            # row_ptr decreasing
    with pytest.raises(ValueError):
        CsrMatrix(2, [0, 1, 2], [0, 5], [1.0, 1.0])            # column out of range


@given(st.integers(1, 40), st.integers(0, 2 ** 31 - 1))
def test_csr_invariants(n, seed):
    rng = np.random.default_rng(seed)
    A = CsrMatrix.from_dense(random_symmetric(rng, n, 0.3))
    assert A.row_ptr[0] == 0 and np.all(np.diff(A.row_ptr) >= 0)
    for i in range(n):
        cols = A.col_idx[A.row_ptr[i]:A.row_ptr[i + 1]]
        assert np.all(np.diff(cols) > 0)
    D = A.toarray()
    np.testing.assert_array_equal(D, D.T)


def test_cg_identity_one_step():
    b = np.arange(1.0, 6.0)
    np.testing.assert_allclose(cg_solve(CsrMatrix.from_scipy(sp.eye(5)), b, maxiter=1), b)


def test_cg_manufactured_solution():
    A, _ = laplacian_1d(300)
    rng = np.random.default_rng(1)
    x_true = rng.standard_normal(300)
    b = matvec(A, x_true)
    x = cg_solve(A, b, tol=1e-12)
    assert np.linalg.norm(matvec(A, x) - b) <= 1e-12 * np.linalg.norm(b)
    np.testing.assert_allclose(x, x_true, atol=1e-6)


def test_cg_indefinite_raises():
    A = CsrMatrix.from_scipy(sp.diags([1.0, -1.0, 2.0]))
    with pytest.raises(LinearSolverError):
        cg_solve(A, np.array([0.0, 1.0, 0.0]))


def test_cg_iteration_limit():
    A, _ = laplacian_1d(300)
    with pytest.raises(LinearSolverError) as info:
        cg_solve(A, np.ones(300), tol=1e-14, maxiter=3)
    assert info.value.residual > 1e-14


def test_diagonal_pencil():
    n = 60
    K = CsrMatrix.from_scipy(sp.diags(np.arange(1.0, n + 1)))
    res = smallest_eigenpairs(K, CsrMatrix.from_scipy(sp.eye(n)), k=3, tol=1e-10)
    np.testing.assert_allclose(res.eigenvalues, [1, 2, 3], rtol=1e-12)


def test_laplacian_smallest_three():
    A, _ = laplacian_1d(512)
    res = smallest_eigenpairs(A, CsrMatrix.from_scipy(sp.eye(512)), k=3, tol=1e-6, maxiter=20000)
    np.testing.assert_allclose(res.eigenvalues, fd_eigenvalues(512, 3), rtol=1e-8)


def random_pencil(rng, n):
    K = CsrMatrix.from_dense(random_symmetric(rng, n, 0.15))
    G = rng.standard_normal((n, n)) * (rng.random((n, n)) < 0.05)
    Mm = CsrMatrix.from_dense(G @ G.T + n * np.eye(n) * 0.1)
    return K, Mm


def test_random_pencil_against_dense():
    rng = np.random.default_rng(2)
    K, M = random_pencil(rng, 80)
    res = smallest_eigenpairs(K, M, k=4, tol=1e-10, maxiter=20000)
    np.testing.assert_allclose(res.eigenvalues, dense_eig_oracle(K, M)[:4], atol=1e-8)
    R = K.toarray() @ res.eigenvectors - (M.toarray() @ res.eigenvectors) * res.eigenvalues
    norms = np.linalg.norm(R, axis=0) / np.linalg.norm(res.eigenvectors, axis=0)
    assert np.all(norms <= 1e-10)


def test_nonconvergence_reports_residuals():
    A, _ = laplacian_1d(400)
    with pytest.raises(EigensolverError) as info:
        smallest_eigenpairs(A, CsrMatrix.from_scipy(sp.eye(400)), k=2, tol=1e-14, maxiter=3)
    assert info.value.residual_norms is not None


@given(st.integers(0, 2 ** 31 - 1))
def test_rayleigh_sandwich(seed):
    rng = np.random.default_rng(seed)
    K, M = random_pencil(np.random.default_rng(7), 60)
    lam1 = smallest_eigenpairs(K, M, k=1, tol=1e-9, maxiter=20000).eigenvalues[0]
    x = rng.standard_normal(60)
    rq = (x @ matvec(K, x)) / (x @ matvec(M, x))
    assert lam1 <= rq + 1e-9


def test_permutation_invariance():
    rng = np.random.default_rng(3)
    K, M = random_pencil(rng, 70)
    p = rng.permutation(70)
    Kp = CsrMatrix.from_dense(K.toarray()[np.ix_(p, p)])
    Mp = CsrMatrix.from_dense(M.toarray()[np.ix_(p, p)])
    a = smallest_eigenpairs(K, M, k=3, tol=1e-10, maxiter=20000).eigenvalues
    b = smallest_eigenpairs(Kp, Mp, k=3, tol=1e-10, maxiter=20000).eigenvalues
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_seeded_runs_are_identical():
    K, M = random_pencil(np.random.default_rng(4), 90)
    a = smallest_eigenpairs(K, M, k=2, tol=1e-9, seed=5, maxiter=20000)
    b = smallest_eigenpairs(K, M, k=2, tol=1e-9, seed=5, maxiter=20000)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)


def test_dense_oracle_examples():
    np.testing.assert_allclose(dense_eig_oracle(np.array([[2.0, 1.0], [1.0, 2.0]])), [1.0, 3.0])
    A, _ = laplacian_1d(64)
    np.testing.assert_allclose(dense_eig_oracle(A, np.eye(64)), fd_eigenvalues(64, 64), rtol=1e-10)
    with pytest.raises(ValueError):
        dense_eig_oracle(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]))


@given(st.integers(2, 60), st.integers(0, 2 ** 31 - 1))
def test_dense_oracle_trace(n, seed):
    A = random_symmetric(np.random.default_rng(seed), n, 0.5)
    assert np.sum(dense_eig_oracle(A)) == pytest.approx(np.trace(A), abs=1e-10 * max(1.0, np.abs(A).sum()))
