"""Stokes flow on the unit square with a staggered (MAC) grid.

Velocity components live on cell faces, pressure at cell centers. The
velocity vanishes on the left, bottom and top edges; the right edge is a
natural outflow boundary, which pins the pressure. The viscous term is
``int 2 kappa grad u : grad v``, discretized as a weighted graph Laplacian
per component with the coefficient sampled at each difference's midpoint.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..saddle import AffineSaddleSystem
from .fields import ConstantVectorField


@dataclass(frozen=True)
class MacLayout:
    nx: int
    ny: int

    @property
    def hx(self) -> float:
        return 1.0 / self.nx

    @property
    def hy(self) -> float:
        return 1.0 / self.ny

    @property
    def n_u1(self) -> int:
        return self.nx * self.ny

    @property
    def n_u2(self) -> int:
        return self.nx * (self.ny - 1)

    @property
    def n_u(self) -> int:
        return self.n_u1 + self.n_u2

    @property
    def n_p(self) -> int:
        return self.nx * self.ny

    def u1(self, i: int, j: int) -> int:
        """Horizontal velocity at ``x = i hx``, ``y = (j + 1/2) hy``, ``i = 1..nx``."""
        return (i - 1) * self.ny + j

    def u2(self, i: int, j: int) -> int:
        """Vertical velocity at ``x = (i + 1/2) hx``, ``y = j hy``, ``j = 1..ny-1``."""
        return self.n_u1 + i * (self.ny - 1) + (j - 1)

    def p(self, i: int, j: int) -> int:
        return i * self.ny + j

    def u1_points(self) -> np.ndarray:
        return np.array([(i * self.hx, (j + 0.5) * self.hy) for i in range(1, self.nx + 1) for j in range(self.ny)])

    def u2_points(self) -> np.ndarray:
        return np.array([((i + 0.5) * self.hx, j * self.hy) for i in range(self.nx) for j in range(1, self.ny)])

    def dof_points(self) -> np.ndarray:
        return np.vstack([self.u1_points(), self.u2_points()])

    def u1_area(self, i: int) -> float:
        return self.hx * self.hy * (0.5 if i == self.nx else 1.0)


def _edges(L: MacLayout):
    """Difference stencil as ``(a, b, coef, point)``; ``b = -1`` is a wall with zero velocity."""
    nx, ny, hx, hy = L.nx, L.ny, L.hx, L.hy
    out = []
    # u1, x-differences across cells (i-1 -> i); i = 0 is the wall
    for i in range(nx):
        for j in range(ny):
            a = L.u1(i + 1, j)
            b = L.u1(i, j) if i >= 1 else -1
            out.append((a, b, hy / hx, ((i + 0.5) * hx, (j + 0.5) * hy)))
    # u1, y-differences at vertices, plus half-distance walls at bottom and top
    for i in range(1, nx + 1):
        w = hx * (0.5 if i == nx else 1.0)
        for j in range(ny - 1):
            out.append((L.u1(i, j + 1), L.u1(i, j), w / hy, (i * hx, (j + 1) * hy)))
        out.append((L.u1(i, 0), -1, w / (0.5 * hy), (i * hx, 0.0)))
        out.append((L.u1(i, ny - 1), -1, w / (0.5 * hy), (i * hx, 1.0)))
    # u2, y-differences across cells; j = 0 and j = ny are walls
    for i in range(nx):
        for j in range(ny):
            lo = L.u2(i, j) if j >= 1 else -1
            hi = L.u2(i, j + 1) if j + 1 <= ny - 1 else -1
            if lo < 0 and hi < 0:
                continue
            a, b = (hi, lo) if hi >= 0 else (lo, hi)
            out.append((a, b, hx / hy, ((i + 0.5) * hx, (j + 0.5) * hy)))
    # u2, x-differences at interior vertical lines, half-distance wall on the left
    for j in range(1, ny):
        for i in range(nx - 1):
            out.append((L.u2(i + 1, j), L.u2(i, j), hy / hx, ((i + 1) * hx, j * hy)))
        out.append((L.u2(0, j), -1, hy / (0.5 * hx), (0.0, j * hy)))
    a = np.array([e[0] for e in out], dtype=np.int64)
    b = np.array([e[1] for e in out], dtype=np.int64)
    coef = np.array([e[2] for e in out])
    pts = np.array([e[3] for e in out])
    return a, b, coef, pts


def _graph_laplacian(n: int, a, b, w) -> np.ndarray:
    A = np.zeros((n, n))
    np.add.at(A, (a, a), w)
    inner = b >= 0
    np.add.at(A, (b[inner], b[inner]), w[inner])
    np.add.at(A, (a[inner], b[inner]), -w[inner])
    np.add.at(A, (b[inner], a[inner]), -w[inner])
    return A


def _divergence(L: MacLayout) -> np.ndarray:
    """Integrated divergence per cell."""
    D = np.zeros((L.n_p, L.n_u))
    for i in range(L.nx):
        for j in range(L.ny):
            r = L.p(i, j)
            D[r, L.u1(i + 1, j)] += L.hy
            if i >= 1:
                D[r, L.u1(i, j)] -= L.hy
            if j + 1 <= L.ny - 1:
                D[r, L.u2(i, j + 1)] += L.hx
            if j >= 1:
                D[r, L.u2(i, j)] -= L.hx
    return D


def build_stokes_mac_2d(nx: int, ny: int, param, body_force=None, name: str = "stokes2d") -> AffineSaddleSystem:
    nx, ny = int(nx), int(ny)
    if nx < 4 or ny < 4:
        raise ValueError(f"resolution must be at least 4 per axis, got {nx} x {ny}")
    if param.dim != 2:
        raise ValueError(f"stokes2d needs a 2D parametrization, got dim = {param.dim}")
    body_force = ConstantVectorField((1.0, 0.0)) if body_force is None else body_force
    L = MacLayout(nx, ny)
    ea, eb, coef, epts = _edges(L)

    def a1_weighted(weight):
        return _graph_laplacian(L.n_u, ea, eb, 2.0 * coef * np.asarray(weight(epts), dtype=float))

    area = np.concatenate(
        [
            [L.u1_area(i) for i in range(1, nx + 1) for _ in range(ny)],
            np.full(L.n_u2, L.hx * L.hy),
        ]
    )
    mass = np.diag(area)
    M_V = mass + _graph_laplacian(L.n_u, ea, eb, coef)

    F1 = np.asarray(body_force(L.u1_points()), dtype=float)[:, 0]
    F2 = np.asarray(body_force(L.u2_points()), dtype=float)[:, 1]
    f = area * np.concatenate([F1, F2])

    return AffineSaddleSystem(
        A_base=np.zeros((L.n_u, L.n_u)),
        A_kappa0=a1_weighted(param.kappa0),
        A_terms=tuple(a1_weighted(t) for t in param.terms),
        B=-_divergence(L),
        f=f,
        g=np.zeros(L.n_p),
        M_V=M_V,
        M_Q=L.hx * L.hy * np.eye(L.n_p),
        a1_weighted=a1_weighted,
        kappa_meta=param,
        M_L2=mass,
        quad_points=epts,
        name=f"{name}(nx={nx},ny={ny})",
    )


def reflect_y(L: MacLayout, u: np.ndarray, p: np.ndarray):
    """Mirror a discrete state across ``y = 1/2``; the vertical component flips sign."""
    ur = np.empty_like(u)
    for i in range(1, L.nx + 1):
        for j in range(L.ny):
            ur[L.u1(i, j)] = u[L.u1(i, L.ny - 1 - j)]
    for i in range(L.nx):
        for j in range(1, L.ny):
            ur[L.u2(i, j)] = -u[L.u2(i, L.ny - j)]
    pr = np.empty_like(p)
    for i in range(L.nx):
        for j in range(L.ny):
            pr[L.p(i, j)] = p[L.p(i, L.ny - 1 - j)]
    return ur, pr
