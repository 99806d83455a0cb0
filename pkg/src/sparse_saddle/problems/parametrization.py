"""Affine coefficient fields ``kappa(x, y) = kappa_0(x) + sum_j y_j kappa_j(x)``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import CellIndicatorField, ConstantField, SineModeField

GRID_1D = 1024
GRID_2D = 256


class EllipticityError(ValueError):
    """The coefficient field is not uniformly bounded below by theta."""


def sampling_grid(dim: int) -> np.ndarray:
    """Sampling points for pointwise checks: 1024 in 1D, 256 x 256 in 2D (boundary included)."""
    if dim == 1:
        return np.linspace(0.0, 1.0, GRID_1D)[:, None]
    if dim == 2:
        g = np.linspace(0.0, 1.0, GRID_2D)
        X, Y = np.meshgrid(g, g, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])
    raise ValueError(f"only 1D and 2D domains are supported, got {dim}")


@dataclass(frozen=True)
class ParametrizationMeta:
    kind: str
    dim: int
    kappa0: object
    terms: tuple
    sup_norms: tuple[float, ...]
    theta: float
    kappa_min: float
    kappa_max: float
    describe: dict = field(default_factory=dict, compare=False)

    @property
    def J(self) -> int:
        return len(self.terms)

    def grid(self, extra_points=None) -> np.ndarray:
        pts = sampling_grid(self.dim)
        if extra_points is not None and len(extra_points):
            extra = np.asarray(extra_points, dtype=float).reshape(-1, self.dim)
            pts = np.vstack([pts, extra])
        return pts

    def term_values(self, points) -> np.ndarray:
        """``(J, m)`` array of ``kappa_j`` at the points."""
        if self.J == 0:
            return np.zeros((0, len(points)))
        return np.vstack([t(points) for t in self.terms])

    def evaluate(self, y, points) -> np.ndarray:
        y = np.asarray(y, dtype=float).ravel()
        if y.size != self.J:
            raise ValueError(f"parameter has {y.size} entries, expected {self.J}")
        return self.kappa0(points) + y @ self.term_values(points)

    def sup_difference(self, y, y_tilde, extra_points=None) -> float:
        """``sup_x |kappa(x, y) - kappa(x, y_tilde)|`` on the sampling grid."""
        pts = self.grid(extra_points)
        dy = np.asarray(y, dtype=float) - np.asarray(y_tilde, dtype=float)
        if dy.size == 0:
            return 0.0
        return float(np.abs(dy @ self.term_values(pts)).max())


def _range_on_grid(kappa0, terms, dim):
    pts = sampling_grid(dim)
    k0 = kappa0(pts)
    spread = np.sum(np.abs(np.vstack([t(pts) for t in terms])), axis=0) if terms else 0.0
    return float(np.min(k0 - spread)), float(np.max(k0 + spread))


def _finish(kind, dim, kappa0, terms, sup_norms, theta, describe):
    kmin, kmax = _range_on_grid(kappa0, terms, dim)
    if not theta < kmin:
        raise EllipticityError(
            f"theta = {theta:g} is not below kappa_min = {kmin:g} on the sampling grid"
        )
    return ParametrizationMeta(
        kind=kind,
        dim=dim,
        kappa0=kappa0,
        terms=tuple(terms),
        sup_norms=tuple(float(s) for s in sup_norms),
        theta=float(theta),
        kappa_min=kmin,
        kappa_max=kmax,
        describe=describe,
    )


def build_global_parametrization(J, sigma, c, kappa0_const, dim=1, theta=None):
    """Globally supported sine modes with amplitudes ``c * j**-sigma``.

    1D: ``sin(j pi x)``; 2D: ``sin(ceil(j/2) pi x1) sin(ceil((j+1)/2) pi x2)``.
    """
    J = int(J)
    if J < 0:
        raise ValueError(f"J must be nonnegative, got {J}")
    if not sigma > 1.0:
        raise ValueError(f"sigma must exceed 1, got {sigma}")
    if not c > 0.0:
        raise ValueError(f"amplitude c must be positive, got {c}")
    theta = kappa0_const / 10.0 if theta is None else float(theta)
    amps = [c * j ** (-sigma) for j in range(1, J + 1)]
    total = math.fsum(amps)
    if not total < kappa0_const - theta:
        raise EllipticityError(
            f"c * sum_j j^-sigma = {total:g} must be below kappa0 - theta = {kappa0_const - theta:g}"
        )
    if dim == 1:
        terms = [SineModeField(a, (j,)) for j, a in enumerate(amps, start=1)]
    elif dim == 2:
        terms = [
            SineModeField(a, (math.ceil(j / 2), math.ceil((j + 1) / 2)))
            for j, a in enumerate(amps, start=1)
        ]
    else:
        raise ValueError(f"only 1D and 2D domains are supported, got {dim}")
    describe = {"kind": "global", "J": J, "sigma": sigma, "c": c, "kappa0": kappa0_const}
    return _finish("global", dim, ConstantField(kappa0_const), terms, amps, theta, describe)


def build_local_parametrization(J, weights, kappa0_const, dim=1, theta=None):
    """Piecewise-constant terms ``w_j * chi_j`` on ``J`` equal cells (strips along x1 in 2D)."""
    J = int(J)
    weights = [float(w) for w in weights]
    if len(weights) != J:
        raise ValueError(f"expected {J} weights, got {len(weights)}")
    theta = kappa0_const / 10.0 if theta is None else float(theta)
    if J and not max(abs(w) for w in weights) < kappa0_const - theta:
        raise EllipticityError(
            f"max |w_j| = {max(abs(w) for w in weights):g} must be below "
            f"kappa0 - theta = {kappa0_const - theta:g}"
        )
    if dim not in (1, 2):
        raise ValueError(f"only 1D and 2D domains are supported, got {dim}")
    terms = [CellIndicatorField(w, (j - 1) / J, j / J, axis=0) for j, w in enumerate(weights, start=1)]
    describe = {"kind": "local", "J": J, "weights": tuple(weights), "kappa0": kappa0_const}
    return _finish("local", dim, ConstantField(kappa0_const), terms, [abs(w) for w in weights], theta, describe)


def constant_parametrization(kappa0_const, dim=1, theta=None):
    """The ``J = 0`` case: a constant coefficient."""
    theta = kappa0_const / 10.0 if theta is None else float(theta)
    return _finish("global", dim, ConstantField(kappa0_const), [], [], theta, {"kind": "constant"})
