"""Summability diagnostics, admissible dilation sequences, tails and rate fits."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .linalg import gram_norm
from .multiindex import IndexSet, MultiIndex, descending_values, tail_sums
from .saddle import DEFAULT_SEED, solve_at
from .taylor import evaluate

ADMISSIBLE_TOL = 1e-12
RHO_FLOOR = 1.0 + 1e-6


class NoAdmissibleRhoError(ValueError):
    """No dilation sequence with ``rho_j > 1`` fits under ``kappa_0 - epsilon``."""


class InsufficientDataError(ValueError):
    """Too few usable points for a rate fit."""


class IncompleteSimplexError(ValueError):
    """Level sums need every index up to the top degree."""


def _values(norms) -> np.ndarray:
    if isinstance(norms, Mapping):
        return np.array([float(v) for v in norms.values()])
    return np.asarray(list(norms), dtype=float).ravel()


def ls_norm(norms, s: float) -> float:
    """``(sum c^s)^(1/s)``."""
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    v = _values(norms)
    if v.size == 0:
        return 0.0
    return float(np.sum(v**s) ** (1.0 / s))


@dataclass(frozen=True)
class RhoSequence:
    values: tuple[float, ...]
    epsilon: float
    admissible: bool
    worst_point: tuple[float, ...]
    worst_margin: float

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self) -> int:
        return len(self.values)


def _margin(rho, param, epsilon, extra_points=None):
    """``sum_j rho_j |kappa_j(x)| - (kappa_0(x) - epsilon)`` on the sampling grid."""
    pts = param.grid(extra_points)
    rho = np.asarray(rho, dtype=float).ravel()
    if rho.size != param.J:
        raise ValueError(f"rho has {rho.size} entries, parametrization has J = {param.J}")
    T = np.abs(param.term_values(pts))
    # an infinite rho_j on a term that vanishes contributes nothing
    contrib = np.where(T > 0, rho[:, None] * T, 0.0).sum(axis=0) if param.J else 0.0
    return pts, contrib - (param.kappa0(pts) - epsilon)


def check_rho_admissible(rho, param, epsilon=None, extra_points=None) -> tuple[bool, tuple]:
    """True iff ``sum_j rho_j |kappa_j| <= kappa_0 - epsilon`` at every sampling point; also the worst point."""
    if epsilon is None:
        if not isinstance(rho, RhoSequence):
            raise ValueError("epsilon is required when rho is a plain sequence")
        epsilon = rho.epsilon
    vals = rho.values if isinstance(rho, RhoSequence) else rho
    pts, m = _margin(vals, param, epsilon, extra_points)
    k = int(np.argmax(m))
    return bool(m[k] <= ADMISSIBLE_TOL), tuple(float(v) for v in pts[k])


def construct_admissible_rho(param, epsilon: float, extra_points=None) -> RhoSequence:
    """A dilation sequence with ``sum_j rho_j |kappa_j| <= kappa_0 - epsilon``.

    Local terms: ``rho_j = (min kappa_0 - epsilon) / |w_j|`` (disjoint supports).
    Global terms: spread the pointwise slack ``S`` as ``rho_j = 1 + S 2^-j / ||kappa_j||``.
    """
    if not param.theta < epsilon < param.kappa_min:
        raise NoAdmissibleRhoError(
            f"epsilon = {epsilon:g} must lie strictly between theta = {param.theta:g} "
            f"and kappa_min = {param.kappa_min:g}"
        )
    pts = param.grid(extra_points)
    k0 = param.kappa0(pts)
    sup = np.asarray(param.sup_norms, dtype=float)
    if param.kind == "local":
        base = float(k0.min()) - epsilon
        with np.errstate(divide="ignore"):
            rho = np.where(sup > 0, base / sup, np.inf)
        rho = np.maximum(rho, RHO_FLOOR)
    else:
        T = np.abs(param.term_values(pts))
        slack = float(np.min(k0 - epsilon - T.sum(axis=0))) if param.J else float(k0.min() - epsilon)
        if slack <= 0:
            raise NoAdmissibleRhoError(f"pointwise slack min(kappa_0 - epsilon - sum |kappa_j|) = {slack:g} <= 0")
        j = np.arange(1, param.J + 1)
        with np.errstate(divide="ignore"):
            rho = np.where(sup > 0, 1.0 + slack * 2.0 ** (-j) / sup, np.inf)
    ok, worst = check_rho_admissible(rho, param, epsilon, extra_points)
    _, m = _margin(rho, param, epsilon, extra_points)
    return RhoSequence(tuple(float(r) for r in rho), float(epsilon), ok, worst, float(m.max(initial=-np.inf)))


@dataclass(frozen=True)
class LevelSums:
    S: tuple[float, ...]
    sigma: float
    caps: tuple[float, ...]
    geometric_total: float

    def violations(self, slack: float = 0.05) -> list[int]:
        return [k for k, (s, c) in enumerate(zip(self.S, self.caps)) if s > c * (1 + slack)]

    def total_holds(self, slack: float = 0.05) -> bool:
        return sum(self.S) <= self.geometric_total * (1 + slack)


def contraction_factor(param, epsilon: float, theta: float, extra_points=None) -> float:
    """``sup_x (kappa_0 - epsilon) / (kappa_0 + epsilon - 2 theta)``."""
    k0 = param.kappa0(param.grid(extra_points))
    return float(np.max((k0 - epsilon) / (k0 + epsilon - 2.0 * theta)))


def weighted_l2_level_sums(table, rho, sys, epsilon: float, theta: float) -> LevelSums:
    """``S_k = sum_{|nu| = k} a_1(rho^nu t_nu, rho^nu t_nu; (kappa_0 + epsilon)/2 - theta)``."""
    rho = np.asarray(rho, dtype=float).ravel()
    members = set(table.index_set)
    k_max = max(nu.degree for nu in members)
    full = set(IndexSet.simplex(sys.J, k_max))
    if not full <= members:
        raise IncompleteSimplexError(
            f"table lacks {len(full - members)} indices of the degree-{k_max} simplex in {sys.J} dimensions"
        )
    param = sys.kappa_meta
    W = sys.a1_weighted(lambda x: 0.5 * (param.kappa0(x) + epsilon) - theta)
    S = np.zeros(k_max + 1)
    for nu in sorted(full):
        t = table.entries[nu].t_u
        S[nu.degree] += nu.rho_power(rho) ** 2 * float(t @ (W @ t))
    sigma = contraction_factor(param, epsilon, theta, sys.quad_points)
    caps = tuple(float(sigma**k * S[0]) for k in range(k_max + 1))
    total = float(S[0] / (1.0 - sigma)) if sigma < 1 else float("inf")
    return LevelSums(tuple(float(s) for s in S), sigma, caps, total)


def best_n_term_curve(norms, N_values) -> np.ndarray:
    """Sum of all but the ``N`` largest values, for each ``N``; ``N`` past the length gives 0."""
    tails = tail_sums(descending_values(norms))
    n = tails.size - 1
    return np.array([tails[min(max(int(N), 0), n)] for N in N_values], dtype=float)


def default_window(N_max: int) -> tuple[int, int]:
    return max(1, int(round(N_max / 10))), max(1, int(round(0.8 * N_max)))


def fit_rate(N_values, tails, window=None) -> float:
    """Negated least-squares slope of ``log(tail)`` against ``log(N)`` over the window."""
    N = np.asarray(N_values, dtype=float).ravel()
    t = np.asarray(tails, dtype=float).ravel()
    if N.shape != t.shape:
        raise ValueError(f"{N.size} N values but {t.size} tails")
    lo, hi = default_window(int(N.max())) if window is None else window
    keep = (N >= lo) & (N <= hi) & (t > 0) & np.isfinite(t)
    if keep.sum() < 4:
        raise InsufficientDataError(f"only {int(keep.sum())} positive tails in window [{lo}, {hi}]; need 4")
    return -_slope(np.log(N[keep]), np.log(t[keep]))


def _slope(x, z) -> float:
    xm, zm = x.mean(), z.mean()
    return float(np.sum((x - xm) * (z - zm)) / np.sum((x - xm) ** 2))


def estimate_s(sup_norms) -> float:
    """Heuristic summability exponent ``1/sigma`` from a log-log fit of ``||kappa_j||`` against ``j``."""
    v = np.asarray(sup_norms, dtype=float)
    j = np.arange(1, v.size + 1, dtype=float)
    keep = v > 0
    if keep.sum() < 2:
        return float("nan")
    slope = _slope(np.log(j[keep]), np.log(v[keep]))
    return 1.0 / -slope if slope < 0 else float("inf")


def predicted_rate(s: float) -> float:
    """``r(s) = 1/s - 1``."""
    return 1.0 / s - 1.0


@dataclass(frozen=True)
class RateReport:
    N_values: tuple[int, ...]
    tails_u: tuple[float, ...]
    tails_p: tuple[float, ...]
    fitted_rate_u: float
    fitted_rate_p: float
    predicted_rate: float
    s_estimate: float
    fit_window: tuple[int, int]

    def csv_text(self) -> str:
        lines = ["N,tail_u,tail_p"]
        for N, a, b in zip(self.N_values, self.tails_u, self.tails_p):
            lines.append(f"{N},{format(a, '.17g')},{format(b, '.17g')}")
        return "\n".join(lines) + "\n"


def _safe_fit(N, tails, window):
    try:
        return fit_rate(N, tails, window)
    except InsufficientDataError:
        return float("nan")


def rate_report(norms_u, norms_p, N_max: int, window=None, s_estimate=float("nan")) -> RateReport:
    """Best N-term curves for ``N = 1..N_max`` (tails over every supplied norm) and their fitted rates."""
    N = list(range(1, int(N_max) + 1))
    window = default_window(int(N_max)) if window is None else (int(window[0]), int(window[1]))
    tu = best_n_term_curve(norms_u, N)
    tp = best_n_term_curve(norms_p, N)
    return RateReport(
        N_values=tuple(N),
        tails_u=tuple(float(v) for v in tu),
        tails_p=tuple(float(v) for v in tp),
        fitted_rate_u=_safe_fit(N, tu, window),
        fitted_rate_p=_safe_fit(N, tp, window),
        predicted_rate=predicted_rate(s_estimate) if np.isfinite(s_estimate) and s_estimate > 0 else float("nan"),
        s_estimate=float(s_estimate),
        fit_window=window,
    )


def sign_corners(J: int) -> np.ndarray:
    """``2^min(J, 6)`` sign patterns; past six dimensions the pattern repeats with period six."""
    if J == 0:
        return np.zeros((1, 0))
    k = min(J, 6)
    idx = np.arange(2**k)[:, None]
    bits = (idx >> (np.arange(J)[None, :] % k)) & 1
    return np.where(bits == 1, 1.0, -1.0)


@dataclass(frozen=True)
class SampleRecord:
    index: int
    y: tuple[float, ...]
    error_u: float
    error_p: float
    norm_u: float
    norm_p: float


@dataclass(frozen=True)
class SupErrorReport:
    sup_error_u: float
    sup_error_p: float
    records: tuple

    @property
    def sup_relative_u(self) -> float:
        return max((r.error_u / r.norm_u if r.norm_u > 0 else r.error_u) for r in self.records)

    def csv_text(self) -> str:
        lines = ["sample,y,error_u,error_p,norm_u,norm_p"]
        for r in self.records:
            y = " ".join(format(v, ".17g") for v in r.y)
            lines.append(
                f"{r.index},{y},{format(r.error_u, '.17g')},{format(r.error_p, '.17g')},"
                f"{format(r.norm_u, '.17g')},{format(r.norm_p, '.17g')}"
            )
        return "\n".join(lines) + "\n"


def validation_points(J: int, M: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    if M < 1:
        raise ValueError(f"need at least one sample, got M = {M}")
    rng = np.random.default_rng(seed)
    return np.vstack([rng.uniform(-1.0, 1.0, size=(M, J)), sign_corners(J)])


def validate_sup_error(sys, table, M: int, seed: int = DEFAULT_SEED, indices=None) -> SupErrorReport:
    """Largest surrogate error over ``M`` seeded uniform samples plus the sign corners."""
    records = []
    for k, y in enumerate(validation_points(sys.J, M, seed)):
        u, p = solve_at(sys, y)
        ua, pa = evaluate(table, y, indices)
        records.append(
            SampleRecord(
                k,
                tuple(float(v) for v in y),
                gram_norm(u - ua, sys.M_V),
                gram_norm(p - pa, sys.M_Q),
                gram_norm(u, sys.M_V),
                gram_norm(p, sys.M_Q),
            )
        )
    return SupErrorReport(
        max(r.error_u for r in records),
        max(r.error_p for r in records),
        tuple(records),
    )


def pressure_constant(report, epsilon: float, kappa0_sup: float) -> float:
    """``C_3 = C_1 C_2 (alpha + gamma)/(alpha beta) (||kappa_0|| - epsilon)`` with ``C_2 = C_u``."""
    a, b, g = report.alpha_h, report.beta_h, report.gamma_h
    return report.C_1 * report.C_u * (a + g) / (a * b) * (kappa0_sup - epsilon)


def envelope_violations(indicators: Mapping, envelope: Mapping, tol: float = 0.0) -> list[MultiIndex]:
    """Indices where the raw indicator falls short of its envelope, i.e. non-monotone spots."""
    return sorted(nu for nu in indicators if envelope[nu] > indicators[nu] + tol)
