"""Loop kernels compiled with numba."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def lu_factor_inplace(a):
    """Partial-pivoting LU of ``a`` in place: P a = L U.

    Returns ``(perm, info)`` where ``perm[i]`` is the original row now at
    position ``i`` and ``info`` is -1 on success or the first column with an
    exactly zero pivot.
    """
    n = a.shape[0]
    perm = np.arange(n)
    info = -1
    for k in range(n):
        p = k
        amax = abs(a[k, k])
        for i in range(k + 1, n):
            v = abs(a[i, k])
            if v > amax:
                amax = v
                p = i
        if amax == 0.0:
            if info < 0:
                info = k
            continue
        if p != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = tmp
            tmpi = perm[k]
            perm[k] = perm[p]
            perm[p] = tmpi
        piv = a[k, k]
        for i in range(k + 1, n):
            l = a[i, k] / piv
            a[i, k] = l
            if l != 0.0:
                for j in range(k + 1, n):
                    a[i, j] -= l * a[k, j]
    return perm, info


@njit(cache=True, nogil=True)
def lu_solve(lu, perm, b):
    """Solve ``K x = b`` for 2D ``b`` from the packed factors of ``lu_factor_inplace``."""
    n, m = b.shape
    x = np.empty((n, m))
    for i in range(n):
        for c in range(m):
            x[i, c] = b[perm[i], c]
    for i in range(n):
        for k in range(i):
            l = lu[i, k]
            if l != 0.0:
                for c in range(m):
                    x[i, c] -= l * x[k, c]
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            u = lu[i, k]
            if u != 0.0:
                for c in range(m):
                    x[i, c] -= u * x[k, c]
        d = lu[i, i]
        for c in range(m):
            x[i, c] /= d
    return x


@njit(cache=True, nogil=True)
def lu_solve_t(lu, perm, b):
    """Solve ``K^T x = b`` for 2D ``b``."""
    n, m = b.shape
    w = b.copy()
    # U^T w = b
    for i in range(n):
        for k in range(i):
            u = lu[k, i]
            if u != 0.0:
                for c in range(m):
                    w[i, c] -= u * w[k, c]
        d = lu[i, i]
        for c in range(m):
            w[i, c] /= d
    # L^T z = w
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            l = lu[k, i]
            if l != 0.0:
                for c in range(m):
                    w[i, c] -= l * w[k, c]
    x = np.empty((n, m))
    for i in range(n):
        for c in range(m):
            x[perm[i], c] = w[i, c]
    return x


@njit(cache=True, nogil=True)
def cholesky(a):
    """Lower Cholesky factor; ``info`` is -1 or the failing column."""
    n = a.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        s = a[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if not s > 0.0:
            return L, j
        d = np.sqrt(s)
        L[j, j] = d
        for i in range(j + 1, n):
            t = a[i, j]
            for k in range(j):
                t -= L[i, k] * L[j, k]
            L[i, j] = t / d
    return L, -1


@njit(cache=True, nogil=True)
def solve_lower(L, b):
    """Solve ``L x = b`` (2D ``b``) by forward substitution."""
    n, m = b.shape
    x = b.copy()
    for i in range(n):
        for k in range(i):
            l = L[i, k]
            if l != 0.0:
                for c in range(m):
                    x[i, c] -= l * x[k, c]
        d = L[i, i]
        for c in range(m):
            x[i, c] /= d
    return x


@njit(cache=True, nogil=True)
def solve_lower_t(L, b):
    """Solve ``L^T x = b`` (2D ``b``) by back substitution."""
    n, m = b.shape
    x = b.copy()
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            l = L[k, i]
            if l != 0.0:
                for c in range(m):
                    x[i, c] -= l * x[k, c]
        d = L[i, i]
        for c in range(m):
            x[i, c] /= d
    return x


@njit(cache=True, nogil=True)
def jacobi_eigenvalues(a, tol, max_sweeps):
    """Cyclic Jacobi on a symmetric matrix (copied).

    Stops once the off-diagonal Frobenius norm is at most ``tol`` times the
    full Frobenius norm. Returns ``(eigenvalues, sweeps, converged)``.
    """
    A = a.copy()
    n = A.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += A[i, j] * A[i, j]
    scale = np.sqrt(total)
    sweeps = 0
    converged = False
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j] * A[i, j]
        if np.sqrt(off) <= tol * scale:
            converged = True
            break
        if sweep == max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
    eig = np.empty(n)
    for i in range(n):
        eig[i] = A[i, i]
    return eig, sweeps, converged
