"""Dense numerical kernels used by every other module."""
from .dense import (
    ConvergenceError,
    Factorization,
    NotPositiveDefiniteError,
    SingularMatrixError,
    cholesky,
    gram_norm,
    lu_factor,
    m_orthonormalize,
    null_space_basis,
    solve,
    solve_transposed,
    sym_eig_extremes,
    sym_eigenvalues,
)
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "Factorization",
    "NotPositiveDefiniteError",
    "SingularMatrixError",
    "cholesky",
    "gram_norm",
    "lu_factor",
    "m_orthonormalize",
    "null_space_basis",
    "solve",
    "solve_transposed",
    "sym_eig_extremes",
    "sym_eigenvalues",
]
