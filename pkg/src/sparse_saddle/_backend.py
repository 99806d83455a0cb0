"""Kernel backend selection.

Hot loops are written twice: a numba ``@njit`` version and a vectorized
numpy version. ``SPARSE_SADDLE_BACKEND=numpy`` forces the numpy path;
otherwise numba is used whenever it imports.
"""
import os

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

_requested = os.environ.get("SPARSE_SADDLE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(
        f"SPARSE_SADDLE_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

BACKEND = "numba" if (_requested == "numba" and HAS_NUMBA) else "numpy"


def worker_count():
    """Worker cap from ``SPARSE_SADDLE_THREADS`` (default 1)."""
    raw = os.environ.get("SPARSE_SADDLE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SPARSE_SADDLE_THREADS must be an integer, got {raw!r}")
    return max(1, n)
