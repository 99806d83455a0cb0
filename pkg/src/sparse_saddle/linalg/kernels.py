"""Dispatch to the numba or numpy kernel set according to ``_backend.BACKEND``."""
from .._backend import BACKEND

from . import _numpy_kernels as numpy_impl

if BACKEND == "numba":
    from . import _numba_kernels as _impl
else:
    _impl = numpy_impl

lu_factor_inplace = _impl.lu_factor_inplace
lu_solve = _impl.lu_solve
lu_solve_t = _impl.lu_solve_t
cholesky = _impl.cholesky
solve_lower = _impl.solve_lower
solve_lower_t = _impl.solve_lower_t
jacobi_eigenvalues = _impl.jacobi_eigenvalues

__all__ = [
    "BACKEND",
    "numpy_impl",
    "lu_factor_inplace",
    "lu_solve",
    "lu_solve_t",
    "cholesky",
    "solve_lower",
    "solve_lower_t",
    "jacobi_eigenvalues",
]
