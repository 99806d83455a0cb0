"""Taylor coefficients of the parametric solution ``y -> (u(y), p(y))``.

Every coefficient solves a saddle point system with the nominal operator
``K(0)``; only the right-hand side changes:

    K(0) [t_nu^u; t_nu^p] = [-sum_{j in supp nu} A_j t_{nu - e_j}^u; 0],

and the root ``nu = 0`` is the nominal problem itself. One factorization of
``K(0)`` therefore serves the whole table.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import groupby

import numpy as np

from ._backend import worker_count
from .linalg import gram_norm, lu_factor, solve
from .multiindex import (
    ContractViolation,
    DimensionMismatch,
    IndexSet,
    MultiIndex,
    forward_neighbors,
    graded_lex_key,
    is_downward_closed,
    monomial_eval,
)
from .saddle import BOUND_SLACK, assemble_at, rhs

CSV_HEADER = ("index", "total_degree", "norm_u", "norm_p")


class InadmissibleRhoError(ValueError):
    """Some ``rho_j <= 1``."""


@dataclass(frozen=True)
class Coefficient:
    t_u: np.ndarray
    t_p: np.ndarray
    norm_u: float
    norm_p: float


@dataclass
class TaylorTable:
    entries: dict
    index_set: IndexSet
    system_fingerprint: str

    def __contains__(self, nu) -> bool:
        return nu in self.entries

    def __getitem__(self, nu) -> Coefficient:
        return self.entries[nu]

    def __len__(self) -> int:
        return len(self.entries)

    def graded(self) -> list[MultiIndex]:
        return sorted(self.entries)

    def norms_u(self, indices=None) -> dict:
        keys = self.index_set if indices is None else indices
        return {nu: self.entries[nu].norm_u for nu in keys}

    def norms_p(self, indices=None) -> dict:
        keys = self.index_set if indices is None else indices
        return {nu: self.entries[nu].norm_p for nu in keys}

    @property
    def max_dim(self) -> int:
        return max((nu.max_dim for nu in self.entries), default=0)

    def to_csv(self, indices=None) -> str:
        """CSV text with the multi-index encoding; rows follow ``indices`` (default: insertion order)."""
        keys = self.index_set.insertion_order if indices is None else list(indices)
        return coefficients_csv((nu, self.entries[nu].norm_u, self.entries[nu].norm_p) for nu in keys)

    def vectors_text(self, indices=None) -> str:
        """One line per coefficient: ``index``, then ``u`` and ``p`` entries, 17 significant digits."""
        keys = self.index_set.insertion_order if indices is None else list(indices)
        lines = []
        for nu in keys:
            c = self.entries[nu]
            vals = " ".join(format(float(v), ".17g") for v in np.concatenate([c.t_u, c.t_p]))
            lines.append(f"{nu.encode()}\t{vals}")
        return "\n".join(lines) + ("\n" if lines else "")


def coefficients_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for nu, nu_, np_ in rows:
        w.writerow([nu.encode(), nu.degree, format(float(nu_), ".17g"), format(float(np_), ".17g")])
    return buf.getvalue()


class TaylorEngine:
    """Computes coefficients on demand against a single factorization of ``K(0)``."""

    def __init__(self, sys, workers: int | None = None):
        self.sys = sys
        self.workers = worker_count() if workers is None else max(1, int(workers))
        self.factorization = lu_factor(assemble_at(sys, np.zeros(sys.J)))
        self.entries: dict[MultiIndex, Coefficient] = {}

    def _solve_one(self, nu: MultiIndex) -> Coefficient:
        sys = self.sys
        if nu.degree == 0:
            b = rhs(sys)
        else:
            r = np.zeros(sys.n_u)
            for j in nu.support:
                if j > sys.J:
                    raise DimensionMismatch(f"{nu!r} uses dimension {j} but the system has J = {sys.J}")
                r -= sys.A_terms[j - 1] @ self.entries[nu.sub_unit(j)].t_u
            b = np.concatenate([r, np.zeros(sys.n_q)])
        x = solve(self.factorization, b)
        t_u, t_p = x[: sys.n_u], x[sys.n_u :]
        return Coefficient(t_u, t_p, gram_norm(t_u, sys.M_V), gram_norm(t_p, sys.M_Q))

    def compute(self, indices) -> None:
        """Compute every missing coefficient in ``indices``; predecessors must be known or included."""
        todo = sorted({nu for nu in indices if nu not in self.entries})
        known = set(self.entries) | set(todo)
        for nu in todo:
            for mu in nu.backward_neighbors():
                if mu not in known:
                    raise ContractViolation(f"{nu!r} needs {mu!r}, which is neither computed nor requested")
        pool = ThreadPoolExecutor(self.workers) if self.workers > 1 else None
        try:
            # levels are independent given all lower levels; barrier between levels
            for _, level in groupby(todo, key=lambda nu: nu.degree):
                level = list(level)
                results = list(pool.map(self._solve_one, level)) if pool else [self._solve_one(nu) for nu in level]
                for nu, c in zip(level, results):
                    self.entries[nu] = c
        finally:
            if pool:
                pool.shutdown()

    def table(self, index_set: IndexSet) -> TaylorTable:
        return TaylorTable(dict(self.entries), index_set, self.sys.fingerprint)


def compute_coefficients(sys, index_set, workers: int | None = None) -> TaylorTable:
    """Taylor coefficients for every member of a downward-closed set."""
    if not isinstance(index_set, IndexSet):
        index_set = IndexSet(index_set)
    if len(index_set) == 0 or not is_downward_closed(index_set):
        raise ContractViolation("compute_coefficients requires a nonempty downward-closed index set")
    engine = TaylorEngine(sys, workers)
    engine.compute(index_set)
    return engine.table(index_set)


def evaluate(table: TaylorTable, y, indices=None) -> tuple[np.ndarray, np.ndarray]:
    """Truncated Taylor sum ``sum_nu t_nu y^nu`` over ``indices`` (default: the table's set), graded order."""
    y = np.asarray(y, dtype=float).ravel()
    keys = sorted(table.index_set if indices is None else indices)
    need = max((nu.max_dim for nu in keys), default=0)
    if y.size < need:
        raise DimensionMismatch(f"parameter has {y.size} entries, the index set uses {need} dimensions")
    first = table.entries[keys[0]]
    u = np.zeros_like(first.t_u)
    p = np.zeros_like(first.t_p)
    for nu in keys:
        c = table.entries[nu]
        m = monomial_eval(nu, y)
        if m != 0.0:
            u += m * c.t_u
            p += m * c.t_p
    return u, p


def indicator_values(table: TaylorTable, weight_u: float, indices) -> dict:
    """Mixed indicator ``w norm_u / ||t_0^u|| + (1 - w) norm_p / ||t_0^p||`` for each index."""
    root = table.entries[MultiIndex.zero()]
    su = root.norm_u if root.norm_u > 0 else 1.0
    sp = root.norm_p if root.norm_p > 0 else 1.0
    return {
        nu: weight_u * table.entries[nu].norm_u / su + (1.0 - weight_u) * table.entries[nu].norm_p / sp
        for nu in indices
    }


def _select(indicators: dict) -> MultiIndex:
    # largest indicator; ties (including an all-zero field) go to the graded-lex smallest
    return min(indicators, key=lambda nu: (-indicators[nu], graded_lex_key(nu)))


def adaptive_construct(sys, N_target: int, weight_u: float = 0.5, dim_cap: int | None = None, workers=None):
    """Greedy nested downward-closed sets ``Lambda_1 = {0} subset Lambda_2 subset ...``.

    Each step computes all unexplored admissible forward neighbors and adds
    the one with the largest indicator. Returns ``(index_set, table)``; the
    table also holds the explored but unselected neighbors.
    """
    N_target = int(N_target)
    if N_target < 1:
        raise ValueError(f"N_target must be at least 1, got {N_target}")
    if not 0.0 <= weight_u <= 1.0:
        raise ValueError(f"weight_u must lie in [0, 1], got {weight_u}")
    dim_cap = sys.J if dim_cap is None else min(int(dim_cap), sys.J)
    engine = TaylorEngine(sys, workers)
    chosen = IndexSet([MultiIndex.zero()])
    engine.compute(chosen)
    frontier: set[MultiIndex] = set()
    while len(chosen) < N_target:
        frontier = forward_neighbors(chosen, dim_cap) if dim_cap > 0 else set()
        if not frontier:
            break
        engine.compute(frontier)
        table = engine.table(chosen)
        chosen.add(_select(indicator_values(table, weight_u, frontier)))
    return chosen, engine.table(chosen)


def explored_indices(table: TaylorTable) -> list[MultiIndex]:
    """Computed entries outside the selected set, graded order."""
    return sorted(nu for nu in table.entries if nu not in table.index_set)


def coefficient_bound_check(table: TaylorTable, rho, C_u: float, slack: float = BOUND_SLACK, indices=None):
    """Every ``nu`` with ``norm_u > C_u rho^{-nu} (1 + slack)``."""
    rho = np.asarray(rho, dtype=float).ravel()
    if rho.size and rho.min() <= 1.0:
        raise InadmissibleRhoError(f"rho_j must exceed 1, got min {rho.min():.17g}")
    keys = sorted(table.index_set if indices is None else indices)
    return [nu for nu in keys if table.entries[nu].norm_u > C_u / nu.rho_power(rho) * (1.0 + slack)]


def pressure_bound_check(table: TaylorTable, rho, C_3: float, slack: float = BOUND_SLACK, indices=None):
    """Every ``nu != 0`` with ``norm_p > C_3 rho^{-nu} |nu|_0 (1 + slack)``."""
    rho = np.asarray(rho, dtype=float).ravel()
    if rho.size and rho.min() <= 1.0:
        raise InadmissibleRhoError(f"rho_j must exceed 1, got min {rho.min():.17g}")
    keys = sorted(table.index_set if indices is None else indices)
    return [
        nu
        for nu in keys
        if nu.degree > 0 and table.entries[nu].norm_p > C_3 * nu.support_size / nu.rho_power(rho) * (1.0 + slack)
    ]


def kernel_residuals(table: TaylorTable, B) -> dict:
    """``||B t_nu^u||_2 / (1 + ||t_nu^u||_2)`` for every ``nu != 0``."""
    out = {}
    for nu, c in table.entries.items():
        if nu.degree > 0:
            out[nu] = float(np.linalg.norm(B @ c.t_u) / (1.0 + np.linalg.norm(c.t_u)))
    return out
