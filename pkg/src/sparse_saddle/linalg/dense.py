"""Dense factorizations, solves, generalized symmetric eigen-extremes and norms."""
from dataclasses import dataclass, field

import numpy as np

from . import kernels

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Factorization:
    """Packed row-pivoted LU factors of a square matrix (P K = L U)."""

    lu: np.ndarray
    perm: np.ndarray
    cond_estimate: float
    singular: bool = False
    norm1: float = field(default=0.0, repr=False)

    @property
    def n(self):
        return self.lu.shape[0]


def _as_matrix(K, name="matrix"):
    K = np.asarray(K, dtype=float)
    if K.ndim != 2:
        raise ValueError(f"{name} must be 2D, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise ValueError(f"{name} has non-finite entries")
    return K


def _inverse_norm1_estimate(lu, perm, max_iter=5):
    # Hager / Higham 1-norm estimator for ||K^{-1}||_1.
    n = lu.shape[0]
    x = np.full((n, 1), 1.0 / n)
    est = 0.0
    last_j = -1
    for _ in range(max_iter):
        y = kernels.lu_solve(lu, perm, x)
        est = float(np.abs(y).sum())
        xi = np.where(y >= 0.0, 1.0, -1.0)
        z = kernels.lu_solve_t(lu, perm, xi)
        j = int(np.argmax(np.abs(z[:, 0])))
        if np.abs(z[j, 0]) <= float(z[:, 0] @ x[:, 0]) or j == last_j:
            break
        last_j = j
        x = np.zeros((n, 1))
        x[j, 0] = 1.0
    return est


def lu_factor(K):
    """Factor a square matrix with partial pivoting.

    Raises :class:`SingularMatrixError` if a column has no nonzero pivot.
    The returned factorization carries a 1-norm condition estimate.
    """
    K = _as_matrix(K, "K")
    if K.shape[0] != K.shape[1]:
        raise ValueError(f"K must be square, got shape {K.shape}")
    lu = np.array(K, dtype=float, order="C", copy=True)
    perm, info = kernels.lu_factor_inplace(lu)
    if info >= 0:
        raise SingularMatrixError(f"exact zero pivot in column {info}")
    norm1 = float(np.abs(K).sum(axis=0).max()) if K.size else 0.0
    cond = norm1 * _inverse_norm1_estimate(lu, perm) if K.size else 0.0
    return Factorization(lu=lu, perm=np.asarray(perm), cond_estimate=cond, norm1=norm1)


def solve(F, b):
    """Solve ``K x = b`` with a factorization; ``b`` may be a vector or a matrix."""
    if F.singular:
        raise SingularMatrixError("factorization is flagged singular")
    b = np.asarray(b, dtype=float)
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    if B.shape[0] != F.n:
        raise ValueError(f"dimension mismatch: factorization is {F.n}, rhs has {B.shape[0]} rows")
    x = kernels.lu_solve(F.lu, F.perm, np.ascontiguousarray(B))
    return x[:, 0] if vec else x


def solve_transposed(F, b):
    """Solve ``K^T x = b``."""
    b = np.asarray(b, dtype=float)
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    if B.shape[0] != F.n:
        raise ValueError(f"dimension mismatch: factorization is {F.n}, rhs has {B.shape[0]} rows")
    x = kernels.lu_solve_t(F.lu, F.perm, np.ascontiguousarray(B))
    return x[:, 0] if vec else x


def cholesky(M):
    """Lower Cholesky factor of an SPD matrix."""
    M = _as_matrix(M, "M")
    L, info = kernels.cholesky(np.ascontiguousarray(M))
    if info >= 0:
        raise NotPositiveDefiniteError(f"matrix is not positive definite (column {info})")
    return L


def _check_symmetric(A, name, tol=1e-12):
    scale = max(1.0, float(np.abs(A).max())) if A.size else 1.0
    if A.shape[0] != A.shape[1] or np.abs(A - A.T).max(initial=0.0) > tol * scale:
        raise ValueError(f"{name} is not symmetric within {tol:g}")


def sym_eigenvalues(A, M=None):
    """All eigenvalues of ``A x = lambda M x`` (ascending), via Cholesky + cyclic Jacobi."""
    A = _as_matrix(A, "A")
    _check_symmetric(A, "A")
    if M is None:
        C = A
    else:
        M = _as_matrix(M, "M")
        _check_symmetric(M, "M")
        if M.shape != A.shape:
            raise ValueError(f"shape mismatch: A {A.shape}, M {M.shape}")
        L = cholesky(M)
        # C = L^{-1} A L^{-T}
        X = kernels.solve_lower(L, np.ascontiguousarray(A))
        C = kernels.solve_lower(L, np.ascontiguousarray(X.T))
        C = 0.5 * (C + C.T)
    if C.shape[0] == 0:
        return np.empty(0)
    eig, _, converged = kernels.jacobi_eigenvalues(
        np.ascontiguousarray(C), JACOBI_TOL, JACOBI_MAX_SWEEPS
    )
    if not converged:
        raise ConvergenceError(f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return np.sort(eig)


def sym_eig_extremes(A, M=None):
    """Smallest and largest generalized eigenvalue of the pencil ``(A, M)``."""
    eig = sym_eigenvalues(A, M)
    if eig.size == 0:
        raise ValueError("empty matrix has no eigenvalues")
    return float(eig[0]), float(eig[-1])


def gram_norm(v, M):
    """Discrete Hilbert norm ``sqrt(v^T M v)``."""
    v = np.asarray(v, dtype=float)
    M = np.asarray(M, dtype=float)
    if M.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: v has {v.size} entries, M is {M.shape}")
    return float(np.sqrt(max(float(v @ (M @ v)), 0.0)))


def null_space_basis(B, tol=1e-12):
    """Columns spanning ``ker B``, from Gauss-Jordan elimination with partial pivoting.

    Pivots below ``tol * max|B|`` are treated as zero.
    """
    R = np.array(_as_matrix(B, "B"), dtype=float, copy=True)
    m, n = R.shape
    thresh = tol * max(float(np.abs(R).max(initial=0.0)), 1.0)
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        p = row + int(np.argmax(np.abs(R[row:, col])))
        if abs(R[p, col]) <= thresh:
            R[row:, col] = 0.0
            continue
        if p != row:
            R[[row, p]] = R[[p, row]]
        R[row] /= R[row, col]
        others = np.abs(R[:, col]) > 0.0
        others[row] = False
        if others.any():
            R[others] -= np.outer(R[others, col], R[row])
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in set(pivots)]
    Z = np.zeros((n, len(free)))
    for k, c in enumerate(free):
        Z[c, k] = 1.0
        for r, pc in enumerate(pivots):
            Z[pc, k] = -R[r, c]
    return Z


def m_orthonormalize(Z, M, passes=2):
    """Return a basis of ``range(Z)`` that is orthonormal in the ``M`` inner product."""
    Q = np.asarray(Z, dtype=float)
    for _ in range(passes):
        G = Q.T @ (M @ Q)
        G = 0.5 * (G + G.T)
        L = cholesky(G)
        # Q <- Q L^{-T}
        Q = kernels.solve_lower(L, np.ascontiguousarray(Q.T)).T
    return np.ascontiguousarray(Q)
