r"""Finitely supported multi-indices and downward-closed index sets.

A multi-index :math:`\nu = (\nu_1, \nu_2, \dots)` with finitely many nonzero
exponents is stored sparsely as a sorted tuple of ``(dimension, exponent)``
pairs; dimensions are 1-based. Index sets keep their insertion order so that
every prefix of a greedy construction can be recovered.

Text encoding (used in all CSV files): ``"j1:v1;j2:v2"`` with ascending
``j``; the zero multi-index is the empty string.
"""
from __future__ import annotations

import functools
import math
from collections.abc import Iterable, Iterator, Mapping

import numpy as np


class ContractViolation(ValueError):
    """An operation was called on an index set that breaks its precondition."""


class DimensionMismatch(ValueError):
    pass


@functools.total_ordering
class MultiIndex:
    """Immutable sparse multi-index.

    Instances sort by graded-lexicographic order (see :func:`graded_lex_key`);
    use :meth:`precedes` for the componentwise partial order.
    """

    __slots__ = ("_entries", "_hash", "_key")

    def __init__(self, entries: Iterable[tuple[int, int]] = ()):
        acc: dict[int, int] = {}
        for j, v in entries:
            j, v = int(j), int(v)
            if j < 1:
                raise ValueError(f"dimensions are 1-based, got {j}")
            if v < 0:
                raise ValueError(f"exponents must be nonnegative, got {v} in dimension {j}")
            acc[j] = acc.get(j, 0) + v
        self._entries = tuple(sorted((j, v) for j, v in acc.items() if v > 0))
        self._hash = hash(self._entries)
        self._key = None

    @classmethod
    def zero(cls) -> "MultiIndex":
        return _ZERO

    @classmethod
    def unit(cls, j: int, k: int = 1) -> "MultiIndex":
        return cls(((j, k),))

    @classmethod
    def from_dense(cls, exponents: Iterable[int]) -> "MultiIndex":
        return cls((j + 1, v) for j, v in enumerate(exponents))

    @classmethod
    def from_dict(cls, d: Mapping[int, int]) -> "MultiIndex":
        return cls(d.items())

    @property
    def entries(self) -> tuple[tuple[int, int], ...]:
        return self._entries

    @property
    def degree(self) -> int:
        """Total degree :math:`|\\nu|`."""
        return sum(v for _, v in self._entries)

    @property
    def support_size(self) -> int:
        """Number of nonzero exponents :math:`|\\nu|_0`."""
        return len(self._entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self._entries)

    @property
    def max_dim(self) -> int:
        """Largest active dimension, 0 for the zero index."""
        return self._entries[-1][0] if self._entries else 0

    def factorial(self) -> int:
        return math.prod(math.factorial(v) for _, v in self._entries)

    def __getitem__(self, j: int) -> int:
        for d, v in self._entries:
            if d == j:
                return v
            if d > j:
                break
        return 0

    def dense(self, length: int | None = None) -> tuple[int, ...]:
        n = self.max_dim if length is None else length
        if n < self.max_dim:
            raise DimensionMismatch(f"length {n} is shorter than active dimension {self.max_dim}")
        out = [0] * n
        for j, v in self._entries:
            out[j - 1] = v
        return tuple(out)

    def add_unit(self, j: int) -> "MultiIndex":
        return MultiIndex(self._entries + ((j, 1),))

    def sub_unit(self, j: int) -> "MultiIndex":
        if self[j] == 0:
            raise ValueError(f"dimension {j} is not in the support of {self}")
        return MultiIndex(tuple((d, v - 1 if d == j else v) for d, v in self._entries))

    def backward_neighbors(self) -> list["MultiIndex"]:
        """All ``nu - e_j`` for ``j`` in the support."""
        return [self.sub_unit(j) for j in self.support]

    def precedes(self, other: "MultiIndex") -> bool:
        """Componentwise ``self <= other``."""
        return all(other[j] >= v for j, v in self._entries)

    def rho_power(self, rho: np.ndarray | list[float]) -> float:
        """:math:`\\prod_j \\rho_j^{\\nu_j}` for a 1-based-by-position sequence."""
        if self.max_dim > len(rho):
            raise DimensionMismatch(
                f"sequence of length {len(rho)} does not cover dimension {self.max_dim}"
            )
        return math.prod(float(rho[j - 1]) ** v for j, v in self._entries)

    def encode(self) -> str:
        return ";".join(f"{j}:{v}" for j, v in self._entries)

    @classmethod
    def decode(cls, text: str) -> "MultiIndex":
        text = text.strip()
        if not text:
            return _ZERO
        entries = []
        last = 0
        for part in text.split(";"):
            try:
                j_s, v_s = part.split(":")
                j, v = int(j_s), int(v_s)
            except ValueError:
                raise ValueError(f"malformed multi-index entry {part!r} in {text!r}") from None
            if j <= last or v <= 0:
                raise ValueError(
                    f"multi-index {text!r} is not canonical (ascending dims, positive exponents)"
                )
            last = j
            entries.append((j, v))
        return cls(entries)

    def _sort_key(self):
        if self._key is None:
            self._key = graded_lex_key(self)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return self._entries == other._entries

    def __lt__(self, other):
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return self._sort_key() < other._sort_key()

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self._entries:
            return "MultiIndex(0)"
        return "MultiIndex(" + " + ".join(
            f"{v}e{j}" if v > 1 else f"e{j}" for j, v in self._entries
        ) + ")"


_ZERO = MultiIndex()


def graded_lex_key(nu: MultiIndex) -> tuple:
    """Sort key: total degree first, then larger leading coordinates first.

    Within a degree level the dense exponent vectors are compared
    lexicographically in descending order, so ``2e1 < e1 + e2 < 2e2`` and
    ``e1 < e2``.
    """
    return (nu.degree, tuple(-v for v in nu.dense()))


def graded_lex_compare(a: MultiIndex, b: MultiIndex) -> int:
    """Three-way comparison under the graded-lex total order (-1, 0 or 1)."""
    ka, kb = graded_lex_key(a), graded_lex_key(b)
    return (ka > kb) - (ka < kb)


def monomial_eval(nu: MultiIndex, y) -> float:
    """:math:`y^\\nu = \\prod_j y_j^{\\nu_j}` with ``0**0 == 1``; ``y[0]`` is dimension 1."""
    y = np.asarray(y, dtype=float).ravel()
    if nu.max_dim > y.size:
        raise DimensionMismatch(
            f"parameter vector has {y.size} entries but {nu!r} uses dimension {nu.max_dim}"
        )
    out = 1.0
    for j, v in nu.entries:
        out *= y[j - 1] ** v
    return float(out)


class IndexSet:
    """Finite set of multi-indices that remembers insertion order.

    Only a single writer may call :meth:`add`; readers may share the set.
    """

    def __init__(self, members: Iterable[MultiIndex] = ()):
        self._members: set[MultiIndex] = set()
        self._order: list[MultiIndex] = []
        self._max_dim = 0
        for nu in members:
            self.add(nu)

    def add(self, nu: MultiIndex) -> bool:
        if nu in self._members:
            return False
        self._members.add(nu)
        self._order.append(nu)
        self._max_dim = max(self._max_dim, nu.max_dim)
        return True

    @property
    def insertion_order(self) -> list[MultiIndex]:
        return list(self._order)

    @property
    def max_active_dim(self) -> int:
        return self._max_dim

    def prefix(self, n: int) -> "IndexSet":
        return IndexSet(self._order[:n])

    def graded(self) -> list[MultiIndex]:
        """Members sorted by graded-lex order."""
        return sorted(self._order)

    def __contains__(self, nu) -> bool:
        return nu in self._members

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self._order)

    def __repr__(self):
        return f"IndexSet({self._order!r})"

    @classmethod
    def simplex(cls, dims: int, max_degree: int) -> "IndexSet":
        """All multi-indices over dimensions ``1..dims`` with degree <= ``max_degree``, graded order."""
        return cls(sorted(_simplex(dims, max_degree)))


def _simplex(dims: int, max_degree: int) -> list[MultiIndex]:
    out = []

    def rec(j, remaining, head):
        if j > dims:
            out.append(MultiIndex(head))
            return
        for v in range(remaining + 1):
            rec(j + 1, remaining - v, head + ((j, v),) if v else head)

    if max_degree < 0:
        return out
    rec(1, max_degree, ())
    return out


def is_downward_closed(index_set: Iterable[MultiIndex]) -> bool:
    members = index_set if isinstance(index_set, (set, frozenset, IndexSet)) else set(index_set)
    return all(mu in members for nu in members for mu in nu.backward_neighbors())


def _require_downward_closed(index_set, what):
    if len(index_set) == 0:
        raise ContractViolation(f"{what} requires a nonempty index set")
    if not is_downward_closed(index_set):
        raise ContractViolation(f"{what} requires a downward-closed index set")


def forward_neighbors(index_set: IndexSet, dim_cap: int) -> set[MultiIndex]:
    """Admissible forward neighbors of a downward-closed set.

    Candidate dimensions are limited to ``1..min(dim_cap, max_active_dim + 1)``
    so only one new dimension is opened at a time.
    """
    if not isinstance(index_set, IndexSet):
        index_set = IndexSet(index_set)
    _require_downward_closed(index_set, "forward_neighbors")
    top = min(int(dim_cap), index_set.max_active_dim + 1)
    out = set()
    for nu in index_set:
        for j in range(1, top + 1):
            cand = nu.add_unit(j)
            if cand in index_set or cand in out:
                continue
            if all(mu in index_set for mu in cand.backward_neighbors()):
                out.add(cand)
    return out


def monotone_envelope(seq: Mapping[MultiIndex, float]) -> dict[MultiIndex, float]:
    """Smallest majorant that is nonincreasing along the partial order.

    ``out[nu] = max(seq[mu] for mu in seq if nu precedes mu)``; the keys of
    ``seq`` must form a downward-closed set.
    """
    keys = set(seq)
    _require_downward_closed(keys, "monotone_envelope")
    top = max(nu.max_dim for nu in keys)
    out: dict[MultiIndex, float] = {}
    # Any mu >= nu in a downward-closed set is reached through some nu + e_j in the set.
    for nu in sorted(keys, reverse=True):
        best = float(seq[nu])
        for j in range(1, top + 1):
            up = nu.add_unit(j)
            if up in out and out[up] > best:
                best = out[up]
        out[nu] = best
    return out


def descending_values(seq) -> np.ndarray:
    """Values sorted decreasing; ties by graded-lex order of keys (mappings) or position."""
    if isinstance(seq, Mapping):
        items = sorted(seq.items(), key=lambda kv: (-float(kv[1]), graded_lex_key(kv[0])))
        vals = np.array([float(v) for _, v in items], dtype=float)
    else:
        vals = np.asarray(list(seq), dtype=float).ravel()
        vals = vals[np.argsort(-vals, kind="stable")]
    if vals.size and (not np.all(np.isfinite(vals)) or vals.min() < 0):
        raise ValueError("norm sequences must be finite and nonnegative")
    return vals


def tail_sums(vals_desc: np.ndarray) -> np.ndarray:
    """``tails[N]`` = sum of ``vals_desc[N:]`` for N = 0..len, summed smallest first."""
    rev = np.cumsum(vals_desc[::-1])
    return np.concatenate([rev[::-1], [0.0]])


def stechkin_tail(seq, s: float, N: int) -> tuple[float, float]:
    """Best N-term tail and its Stechkin bound ``||seq||_{l^s} N^{-(1/s - 1)}``."""
    tails, bounds = stechkin_curve(seq, s, [N])
    return float(tails[0]), float(bounds[0])


def stechkin_curve(seq, s: float, N_values) -> tuple[np.ndarray, np.ndarray]:
    """``stechkin_tail`` for many ``N`` at once; sorts the sequence a single time."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    vals = descending_values(seq)
    N = np.asarray(list(N_values), dtype=int)
    if N.size and not (N.min() >= 1 and N.max() <= vals.size):
        raise ValueError(f"N must lie in 1..{vals.size}, got {N.min()}..{N.max()}")
    ls = float(np.sum(vals**s) ** (1.0 / s))
    return tail_sums(vals)[N], np.array([ls * float(n) ** (-(1.0 / s - 1.0)) for n in N])


def format_multiindex(nu: MultiIndex) -> str:
    return nu.encode()


def parse_multiindex(text: str) -> MultiIndex:
    return MultiIndex.decode(text)
