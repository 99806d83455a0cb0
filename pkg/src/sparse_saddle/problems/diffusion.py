"""Mixed diffusion on (0, 1): P1 flux, P0 pressure.

Weak form: ``int kappa u v + int v' p = 0`` and ``int u' q = -int f q``.
No essential condition on the flux, so the pressure vanishes at both ends.
"""
from __future__ import annotations

import numpy as np

from ..saddle import AffineSaddleSystem
from .fields import ConstantField

_LOCAL_MASS = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0


def _weighted_mass(n: int, weights: np.ndarray) -> np.ndarray:
    h = 1.0 / n
    M = np.zeros((n + 1, n + 1))
    for c in range(n):
        M[c : c + 2, c : c + 2] += weights[c] * h * _LOCAL_MASS
    return M


def build_mixed_diffusion_1d(n: int, param, f_source=None, name: str = "diffusion1d") -> AffineSaddleSystem:
    n = int(n)
    if n < 4:
        raise ValueError(f"resolution must be at least 4, got {n}")
    if param.dim != 1:
        raise ValueError(f"diffusion1d needs a 1D parametrization, got dim = {param.dim}")
    f_source = ConstantField(1.0) if f_source is None else f_source
    h = 1.0 / n
    mids = ((np.arange(n) + 0.5) * h)[:, None]

    def a1_weighted(weight):
        return _weighted_mass(n, np.asarray(weight(mids), dtype=float))

    B = np.zeros((n, n + 1))
    idx = np.arange(n)
    B[idx, idx] = -1.0
    B[idx, idx + 1] = 1.0

    M_L2 = _weighted_mass(n, np.ones(n))
    M_Q = h * np.eye(n)
    M_V = M_L2 + B.T @ B / h

    return AffineSaddleSystem(
        A_base=np.zeros((n + 1, n + 1)),
        A_kappa0=a1_weighted(param.kappa0),
        A_terms=tuple(a1_weighted(t) for t in param.terms),
        B=B,
        f=np.zeros(n + 1),
        g=-h * np.asarray(f_source(mids), dtype=float),
        M_V=M_V,
        M_Q=M_Q,
        a1_weighted=a1_weighted,
        kappa_meta=param,
        M_L2=M_L2,
        quad_points=mids,
        name=f"{name}(n={n})",
    )


def nodes(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 1)


def cell_centers(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n
