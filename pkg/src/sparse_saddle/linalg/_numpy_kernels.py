"""Vectorized numpy twins of the numba loop kernels (same signatures)."""
import numpy as np


def lu_factor_inplace(a):
    n = a.shape[0]
    perm = np.arange(n)
    info = -1
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            if info < 0:
                info = k
            continue
        if p != k:
            a[[k, p], :] = a[[p, k], :]
            perm[[k, p]] = perm[[p, k]]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return perm, info


def lu_solve(lu, perm, b):
    n = lu.shape[0]
    x = b[perm].astype(float, copy=True)
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x


def lu_solve_t(lu, perm, b):
    n = lu.shape[0]
    w = b.astype(float, copy=True)
    for i in range(n):
        w[i] -= lu[:i, i] @ w[:i]
        w[i] /= lu[i, i]
    for i in range(n - 2, -1, -1):
        w[i] -= lu[i + 1:, i] @ w[i + 1:]
    x = np.empty_like(w)
    x[perm] = w
    return x


def cholesky(a):
    n = a.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        s = a[j, j] - L[j, :j] @ L[j, :j]
        if not s > 0.0:
            return L, j
        d = np.sqrt(s)
        L[j, j] = d
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / d
    return L, -1


def solve_lower(L, b):
    n = L.shape[0]
    x = b.astype(float, copy=True)
    for i in range(n):
        x[i] -= L[i, :i] @ x[:i]
        x[i] /= L[i, i]
    return x


def solve_lower_t(L, b):
    n = L.shape[0]
    x = b.astype(float, copy=True)
    for i in range(n - 1, -1, -1):
        x[i] -= L[i + 1:, i] @ x[i + 1:]
        x[i] /= L[i, i]
    return x


def jacobi_eigenvalues(a, tol, max_sweeps):
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    scale = np.linalg.norm(A)
    sweeps = 0
    converged = False
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
        if off <= tol * scale:
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
                colp = A[:, p].copy()
                colq = A[:, q]
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :]
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
    return np.diag(A).copy(), sweeps, converged
