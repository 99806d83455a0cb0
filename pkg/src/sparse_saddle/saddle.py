"""Affine parametric saddle point systems.

A system holds the blocks of

    K(y) = [[A_base + A_kappa0 + sum_j y_j A_j, B^T],
            [B,                                  0  ]]

together with the data ``(f, g)`` and the Gram matrices of the two
discrete Hilbert spaces. Everything here is dense.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .linalg import (
    SingularMatrixError,
    cholesky,
    gram_norm,
    lu_factor,
    m_orthonormalize,
    null_space_basis,
    solve,
    sym_eig_extremes,
    sym_eigenvalues,
)
from .linalg import kernels

DEFAULT_SEED = 20240701
CORNER_CAP = 64
BOUND_SLACK = 0.05


class DegenerateInfSupError(ValueError):
    """The discrete inf-sup constant is numerically zero."""


class EmptyKernelError(ValueError):
    """``ker B`` is trivial, so kernel coercivity is undefined."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AffineSaddleSystem:
    A_base: np.ndarray
    A_kappa0: np.ndarray
    A_terms: tuple
    B: np.ndarray
    f: np.ndarray
    g: np.ndarray
    M_V: np.ndarray
    M_Q: np.ndarray
    a1_weighted: Callable = field(repr=False)
    kappa_meta: object = field(repr=False)
    # L2 Gram on V, used by the discrete Poincare constant
    M_L2: np.ndarray | None = None
    # points where the coefficient enters the discretization
    quad_points: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        for attr in ("A_base", "A_kappa0", "B", "f", "g", "M_V", "M_Q"):
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))
        object.__setattr__(self, "A_terms", tuple(_frozen(A) for A in self.A_terms))
        if self.M_L2 is not None:
            object.__setattr__(self, "M_L2", _frozen(self.M_L2))
        if self.quad_points is not None:
            object.__setattr__(self, "quad_points", _frozen(self.quad_points))
        nu, nq = self.n_u, self.n_q
        shapes = {
            "A_base": (nu, nu),
            "A_kappa0": (nu, nu),
            "B": (nq, nu),
            "f": (nu,),
            "g": (nq,),
            "M_V": (nu, nu),
            "M_Q": (nq, nq),
        }
        for attr, shape in shapes.items():
            if getattr(self, attr).shape != shape:
                raise ValueError(f"{attr} has shape {getattr(self, attr).shape}, expected {shape}")
        for j, A in enumerate(self.A_terms, start=1):
            if A.shape != (nu, nu):
                raise ValueError(f"A_terms[{j}] has shape {A.shape}, expected {(nu, nu)}")

    @property
    def n_u(self) -> int:
        return self.A_kappa0.shape[0]

    @property
    def n_q(self) -> int:
        return self.B.shape[0]

    @property
    def J(self) -> int:
        return len(self.A_terms)

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.name.encode())
        for a in (self.A_base, self.A_kappa0, *self.A_terms, self.B, self.f, self.g, self.M_V, self.M_Q):
            h.update(str(a.shape).encode())
            h.update(np.ascontiguousarray(a).tobytes())
        return h.hexdigest()

    @cached_property
    def kernel_basis(self) -> np.ndarray:
        """``M_V``-orthonormal basis of ``ker B``."""
        Z = null_space_basis(self.B)
        if Z.shape[1] == 0:
            raise EmptyKernelError("ker B is trivial; need n_u > rank B")
        return m_orthonormalize(Z, self.M_V)

    @cached_property
    def _mv_cholesky(self) -> np.ndarray:
        return cholesky(self.M_V)

    @cached_property
    def _mq_cholesky(self) -> np.ndarray:
        return cholesky(self.M_Q)

    def dual_norm_f(self) -> float:
        """``sqrt(f^T M_V^{-1} f)``."""
        z = kernels.solve_lower(self._mv_cholesky, self.f.reshape(-1, 1).copy())
        return float(np.sqrt(np.sum(z * z)))

    def dual_norm_g(self) -> float:
        z = kernels.solve_lower(self._mq_cholesky, self.g.reshape(-1, 1).copy())
        return float(np.sqrt(np.sum(z * z)))

    def norm_u(self, u) -> float:
        return gram_norm(u, self.M_V)

    def norm_p(self, p) -> float:
        return gram_norm(p, self.M_Q)


def _parameter(sys: AffineSaddleSystem, y) -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if y.size != sys.J:
        raise ValueError(f"parameter has {y.size} entries, system has J = {sys.J}")
    if y.size and np.abs(y).max() > 1.0 + 1e-12:
        raise ValueError(f"parameter entries must satisfy |y_j| <= 1, got max {np.abs(y).max():g}")
    return y


def a_block(sys: AffineSaddleSystem, y) -> np.ndarray:
    """``A_base + A_kappa0 + sum_j y_j A_j``, summed in ascending j."""
    y = _parameter(sys, y)
    A = sys.A_base + sys.A_kappa0
    for yj, Aj in zip(y, sys.A_terms):
        if yj != 0.0:
            A = A + yj * Aj
    return A


def assemble_at(sys: AffineSaddleSystem, y) -> np.ndarray:
    A = a_block(sys, y)
    nu, nq = sys.n_u, sys.n_q
    K = np.zeros((nu + nq, nu + nq))
    K[:nu, :nu] = A
    K[:nu, nu:] = sys.B.T
    K[nu:, :nu] = sys.B
    return K


def rhs(sys: AffineSaddleSystem) -> np.ndarray:
    return np.concatenate([sys.f, sys.g])


def solve_at(sys: AffineSaddleSystem, y) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``K(y) [u; p] = [f; g]``."""
    y = _parameter(sys, y)
    try:
        F = lu_factor(assemble_at(sys, y))
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"K(y) is singular at y = {y.tolist()}: {exc}") from exc
    x = solve(F, rhs(sys))
    return x[: sys.n_u], x[sys.n_u :]


def estimate_infsup(sys: AffineSaddleSystem) -> float:
    """``sqrt(lambda_min(B M_V^{-1} B^T, M_Q))``."""
    if not np.any(sys.B):
        raise DegenerateInfSupError("B is zero")
    X = kernels.solve_lower(sys._mv_cholesky, np.ascontiguousarray(sys.B.T))
    S = X.T @ X
    S = 0.5 * (S + S.T)
    lam, _ = sym_eig_extremes(S, sys.M_Q)
    if lam <= 1e-12:
        raise DegenerateInfSupError(f"lambda_min = {lam:g} <= 1e-12")
    return float(np.sqrt(lam))


def estimate_kernel_coercivity(sys: AffineSaddleSystem, y=None) -> float:
    """Smallest eigenvalue of ``A(y)`` restricted to ``ker B`` against ``M_V``."""
    y = np.zeros(sys.J) if y is None else y
    Z = sys.kernel_basis
    A = a_block(sys, y)
    AZ = Z.T @ A @ Z
    MZ = Z.T @ sys.M_V @ Z
    lam, _ = sym_eig_extremes(0.5 * (AZ + AZ.T), 0.5 * (MZ + MZ.T))
    return lam


def corner_parameters(J: int, cap: int = CORNER_CAP, seed: int = DEFAULT_SEED) -> np.ndarray:
    """All corners of ``[-1, 1]^J`` if there are at most ``cap``, else ``cap`` random ones."""
    if J == 0:
        return np.zeros((1, 0))
    if 2**J <= cap:
        k = np.arange(2**J)[:, None]
        bits = (k >> np.arange(J)[None, :]) & 1
        return np.where(bits == 1, 1.0, -1.0)
    rng = np.random.default_rng(seed)
    return rng.choice([-1.0, 1.0], size=(cap, J))


def estimate_continuity(sys: AffineSaddleSystem, corners=None) -> tuple[float, float]:
    """``gamma_h`` (max over corners of ``lambda_max(A(y), M_V)``) and ``delta_h``."""
    corners = corner_parameters(sys.J) if corners is None else np.atleast_2d(corners)
    gamma = max(sym_eig_extremes(a_block(sys, y), sys.M_V)[1] for y in corners)
    # delta^2 = lambda_max(B^T M_Q^{-1} B, M_V)
    X = kernels.solve_lower(sys._mq_cholesky, np.ascontiguousarray(sys.B))
    S = X.T @ X
    _, dmax = sym_eig_extremes(0.5 * (S + S.T), sys.M_V)
    return float(gamma), float(np.sqrt(max(dmax, 0.0)))


def a1_continuity(sys: AffineSaddleSystem) -> float:
    """``C_1``: ``lambda_max`` of the ``a_1`` form at unit coefficient, against ``M_V``."""
    A1 = sys.a1_weighted(lambda x: np.ones(np.asarray(x).shape[0]))
    return sym_eig_extremes(A1, sys.M_V)[1]


def apriori_bounds(alpha, beta, gamma, f_norm, g_norm) -> tuple[float, float]:
    """A-priori constants ``(C_u, C_p)`` bounding ``||u||_V`` and ``||p||_Q``."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    k = (alpha + gamma) / (alpha * beta)
    C_u = f_norm / alpha + k * g_norm
    C_p = k * f_norm + gamma * (alpha + gamma) / (alpha * beta**2) * g_norm
    return float(C_u), float(C_p)


@dataclass(frozen=True)
class WellPosednessReport:
    alpha_h: float
    beta_h: float
    gamma_h: float
    delta_h: float
    C_u: float
    C_p: float
    f_norm: float
    g_norm: float
    C_1: float
    corners: int

    @property
    def well_posed(self) -> bool:
        return min(self.alpha_h, self.beta_h, self.gamma_h, self.delta_h) > 0.0


def well_posedness(sys: AffineSaddleSystem, corners=None) -> WellPosednessReport:
    """Discrete constants over the parameter box.

    ``alpha_h`` is the minimum over corners: the restricted smallest
    eigenvalue is concave in ``y``, so the box minimum sits at a corner.
    """
    corners = corner_parameters(sys.J) if corners is None else np.atleast_2d(corners)
    alpha = min(estimate_kernel_coercivity(sys, y) for y in corners)
    beta = estimate_infsup(sys)
    gamma, delta = estimate_continuity(sys, corners)
    fn, gn = sys.dual_norm_f(), sys.dual_norm_g()
    C_u, C_p = apriori_bounds(alpha, beta, gamma, fn, gn)
    return WellPosednessReport(
        alpha_h=alpha,
        beta_h=beta,
        gamma_h=gamma,
        delta_h=delta,
        C_u=C_u,
        C_p=C_p,
        f_norm=fn,
        g_norm=gn,
        C_1=a1_continuity(sys),
        corners=len(corners),
    )


@dataclass(frozen=True)
class PerturbationResult:
    lhs_u: float
    lhs_p: float
    rhs_bound_u: float
    rhs_bound_p: float
    kappa_diff: float

    def holds(self, slack: float = BOUND_SLACK) -> bool:
        return self.lhs_u <= self.rhs_bound_u * (1 + slack) and self.lhs_p <= self.rhs_bound_p * (1 + slack)


def perturbation_bounds(report: WellPosednessReport, kappa_diff: float) -> tuple[float, float]:
    """Bounds on ``||u - u~||_V`` and ``||p - p~||_Q`` for a coefficient change of sup-norm ``kappa_diff``."""
    a, b, g = report.alpha_h, report.beta_h, report.gamma_h
    base = report.C_1 * report.C_u * kappa_diff
    return base / a, (a + g) / (a * b) * base


def perturbation_check(sys: AffineSaddleSystem, y, y_tilde, report: WellPosednessReport | None = None):
    """Measured solution change between two parameters against the perturbation bound."""
    report = well_posedness(sys) if report is None else report
    u, p = solve_at(sys, y)
    ut, pt = solve_at(sys, y_tilde)
    dk = sys.kappa_meta.sup_difference(y, y_tilde, sys.quad_points)
    ru, rp = perturbation_bounds(report, dk)
    return PerturbationResult(
        lhs_u=gram_norm(u - ut, sys.M_V),
        lhs_p=gram_norm(p - pt, sys.M_Q),
        rhs_bound_u=ru,
        rhs_bound_p=rp,
        kappa_diff=dk,
    )


def infsup_and_eigs(sys: AffineSaddleSystem) -> np.ndarray:
    """All generalized eigenvalues of ``(B M_V^{-1} B^T, M_Q)``; diagnostic helper."""
    X = kernels.solve_lower(sys._mv_cholesky, np.ascontiguousarray(sys.B.T))
    S = X.T @ X
    return sym_eigenvalues(0.5 * (S + S.T), sys.M_Q)
