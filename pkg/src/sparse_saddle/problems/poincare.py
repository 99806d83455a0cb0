"""Discrete Poincare constant ``int |v|^2 <= C int |div v|^2`` off the divergence kernel."""
from __future__ import annotations

import numpy as np

from ..linalg import cholesky, sym_eig_extremes
from ..linalg import kernels


def discrete_poincare_constant(sys) -> float:
    """``max |v|_{L2}^2 / |div v|_{L2}^2`` over the ``L2``-orthogonal complement of ``ker B``.

    That complement is ``range(M_L2^{-1} B^T)``; with ``G = B M_L2^{-1} B^T`` the
    quotient becomes ``q^T G q / q^T G M_Q^{-1} G q``, an eigenproblem on the
    pressure space.
    """
    if sys.M_L2 is None:
        raise ValueError("system carries no L2 Gram matrix")
    L = cholesky(sys.M_L2)
    X = kernels.solve_lower(L, np.ascontiguousarray(sys.B.T))
    G = X.T @ X
    G = 0.5 * (G + G.T)
    if not np.any(G):
        raise ValueError("complement of ker B is trivial")
    LQ = cholesky(sys.M_Q)
    Y = kernels.solve_lower(LQ, np.ascontiguousarray(G))
    H = Y.T @ Y
    _, lam_max = sym_eig_extremes(G, 0.5 * (H + H.T))
    return float(lam_max)
