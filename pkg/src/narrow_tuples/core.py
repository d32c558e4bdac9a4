"""Tuples, residues and the occupancy bookkeeping used by every search operator.

A :class:`TupleState` keeps a tuple ``H`` (a subset of the candidate set ``V``)
together with its occupancy matrix ``M`` and count array ``F``.  ``M`` is
stored flat: row ``i`` (prime ``p_i``) occupies ``M[offsets[i]:offsets[i] + p_i]``
and column ``j`` of that row counts the members of ``H`` congruent to ``j``
modulo ``p_i``.  All indices are 0-based; :meth:`TupleState.occupancy_rows`
gives the row-major nested-list form used for serialization.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class PrimeSet(tuple):
    """Strictly increasing tuple of primes."""

    def __new__(cls, primes: Iterable[int] = ()):
        values = tuple(int(p) for p in primes)
        for a, b in zip(values, values[1:]):
            if b <= a:
                raise ValueError(f"primes must be strictly increasing: {a} then {b}")
        for p in values:
            if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
                raise ValueError(f"{p} is not prime")
        return super().__new__(cls, values)

    def __repr__(self) -> str:
        return f"PrimeSet({tuple(self)!r})"


class ResidueTable:
    """``rows[l, i] = V[l] mod P[i]`` for every candidate and effective prime."""

    def __init__(self, values: np.ndarray, primes: Sequence[int]):
        p = np.asarray(primes, dtype=np.int64)
        self.primes = p
        self.rows = np.mod(np.asarray(values, dtype=np.int64)[:, None], p[None, :]) if len(p) else (
            np.zeros((len(values), 0), dtype=np.int64)
        )

    @property
    def size(self) -> int:
        return int(self.rows.size)

    def __getitem__(self, index: int) -> np.ndarray:
        return self.rows[index]


def build_residue_table(V: Sequence[int], P: Sequence[int]) -> ResidueTable:
    return ResidueTable(np.asarray(V, dtype=np.int64), P)


@dataclass(frozen=True, eq=False)
class ProblemContext:
    """Candidate set and prime sets for one instance.

    ``P_L`` holds the primes that no subset of ``V`` can ever violate; the
    effective set ``P`` is ``P_C - P_L``.  Construct via
    :func:`narrow_tuples.context.build_context` or :meth:`from_parts`.
    """

    k: int
    U: int
    V: np.ndarray
    P_C: PrimeSet
    P_R: PrimeSet
    P_L: PrimeSet
    P: PrimeSet
    residues: ResidueTable = field(repr=False)
    # flat column of M hit by V[l] in row i
    cols: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    # V-index of each integer in [0, U], or -1
    position: np.ndarray = field(repr=False)

    @classmethod
    def from_parts(cls, k: int, U: int, V: Iterable[int], P_C: Iterable[int],
                   P_R: Iterable[int] = (), P_L: Iterable[int] = ()) -> "ProblemContext":
        V_arr = np.asarray(sorted(set(int(v) for v in V)), dtype=np.int64)
        if len(V_arr) and (V_arr[0] < 0 or V_arr[-1] > U):
            raise ValueError("candidate values must lie in [0, U]")
        if len(V_arr) < k:
            raise ValueError(f"only {len(V_arr)} candidates for k={k}")
        P_C = PrimeSet(P_C)
        P_R = PrimeSet(P_R)
        P_L = PrimeSet(P_L)
        if not set(P_R) <= set(P_C) or not set(P_L) <= set(P_C):
            raise ValueError("P_R and P_L must be subsets of P_C")
        P = PrimeSet(p for p in P_C if p not in set(P_L))
        residues = ResidueTable(V_arr, P)
        widths = np.asarray(P, dtype=np.int64)
        offsets = np.concatenate(([0], np.cumsum(widths)[:-1])).astype(np.int64) if len(P) else (
            np.zeros(0, dtype=np.int64)
        )
        cols = residues.rows + offsets[None, :]
        position = np.full(U + 1, -1, dtype=np.int64)
        position[V_arr] = np.arange(len(V_arr))
        for arr in (V_arr, residues.rows, cols, offsets, position):
            arr.setflags(write=False)
        return cls(k=k, U=U, V=V_arr, P_C=P_C, P_R=P_R, P_L=P_L, P=P,
                   residues=residues, cols=cols, offsets=offsets, position=position)

    @property
    def width(self) -> int:
        """Total number of occupancy cells, the sum of the effective primes."""
        return int(sum(self.P))

    def index_of(self, v: int) -> int:
        if 0 <= v <= self.U:
            l = int(self.position[v])
            if l >= 0:
                return l
        raise ValueError(f"{v} is not a candidate value")

    def __contains__(self, v: int) -> bool:
        return 0 <= v <= self.U and self.position[v] >= 0


class TupleState:
    """A sorted tuple drawn from ``V`` with its occupancy matrix and counts.

    ``idx`` lists the members as sorted indices into ``context.V``.  A running
    count of rows with ``f_i == 0`` makes :meth:`is_admissible` O(1).
    """

    __slots__ = ("context", "idx", "member", "M", "F", "n_violated")

    def __init__(self, context: ProblemContext):
        self.context = context
        self.idx: list[int] = []
        self.member = np.zeros(len(context.V), dtype=bool)
        self.M = np.zeros(context.width, dtype=np.int32)
        self.F = np.asarray(context.P, dtype=np.int32).copy()
        self.n_violated = 0

    # -- views --------------------------------------------------------------

    @property
    def H(self) -> tuple[int, ...]:
        V = self.context.V
        return tuple(int(V[l]) for l in self.idx)

    def __len__(self) -> int:
        return len(self.idx)

    def __contains__(self, v: int) -> bool:
        return v in self.context and bool(self.member[self.context.position[v]])

    @property
    def first(self) -> int:
        return int(self.context.V[self.idx[0]])

    @property
    def last(self) -> int:
        return int(self.context.V[self.idx[-1]])

    def diameter(self) -> int:
        if not self.idx:
            raise ValueError("diameter of an empty tuple is undefined")
        return self.last - self.first

    def occupancy_rows(self) -> list[list[int]]:
        off = self.context.offsets
        return [self.M[o:o + p].tolist() for o, p in zip(off, self.context.P)]

    def is_admissible(self) -> bool:
        return self.n_violated == 0

    def copy(self) -> "TupleState":
        other = TupleState.__new__(TupleState)
        other.context = self.context
        other.idx = list(self.idx)
        other.member = self.member.copy()
        other.M = self.M.copy()
        other.F = self.F.copy()
        other.n_violated = self.n_violated
        return other

    def same_as(self, other: "TupleState") -> bool:
        return (self.idx == other.idx and np.array_equal(self.M, other.M)
                and np.array_equal(self.F, other.F) and self.n_violated == other.n_violated)

    # -- 1-moves ------------------------------------------------------------

    def add_index(self, l: int) -> None:
        if self.member[l]:
            raise ValueError(f"{int(self.context.V[l])} is already in the tuple")
        c = self.context.cols[l]
        self.M[c] += 1
        filled = self.M[c] == 1
        if filled.any():
            self.F[filled] -= 1
            self.n_violated += int(np.count_nonzero(self.F[filled] == 0))
        self.member[l] = True
        bisect.insort(self.idx, l)

    def remove_index(self, l: int) -> None:
        if not self.member[l]:
            raise ValueError(f"{int(self.context.V[l])} is not in the tuple")
        c = self.context.cols[l]
        self.M[c] -= 1
        freed = self.M[c] == 0
        if freed.any():
            self.n_violated -= int(np.count_nonzero(self.F[freed] == 0))
            self.F[freed] += 1
        self.member[l] = False
        del self.idx[bisect.bisect_left(self.idx, l)]

    def add_value(self, v: int) -> None:
        self.add_index(self.context.index_of(v))

    def remove_value(self, v: int) -> None:
        self.remove_index(self.context.index_of(v))

    # -- violation checks ---------------------------------------------------

    def tight_rows(self) -> np.ndarray:
        """Rows with exactly one free residue class."""
        return np.flatnonzero(self.F == 1)

    def vio_counts(self, indices: np.ndarray, tight: np.ndarray | None = None) -> np.ndarray:
        """Violation increase for adding each ``V[indices]`` (vectorized VioCheck)."""
        if tight is None:
            tight = self.tight_rows()
        if len(tight) == 0 or len(indices) == 0:
            return np.zeros(len(indices), dtype=np.int64)
        hits = self.M[self.context.cols[np.asarray(indices)[:, None], tight[None, :]]] == 0
        return np.count_nonzero(hits, axis=1)

    def vio_check_index(self, l: int) -> int:
        tight = self.tight_rows()
        if len(tight) == 0:
            return 0
        return int(np.count_nonzero(self.M[self.context.cols[l, tight]] == 0))

    def vio_check(self, v: int) -> int:
        return self.vio_check_index(self.context.index_of(v))

    def vio_row(self, v: int) -> int:
        tight = self.tight_rows()
        rows = tight[self.M[self.context.cols[self.context.index_of(v), tight]] == 0]
        if len(rows) != 1:
            raise ValueError(f"vio_row needs exactly one violated row, found {len(rows)}")
        return int(rows[0])

    def members_of_cell(self, i: int, j: int) -> list[int]:
        """Members of ``H`` congruent to ``j`` mod ``P[i]`` (0-based class)."""
        idx = np.asarray(self.idx, dtype=np.int64)
        if len(idx) == 0:
            return []
        sel = idx[self.context.residues.rows[idx, i] == j]
        return [int(self.context.V[l]) for l in sel]

    def second_best_column(self, i: int) -> tuple[int, int]:
        """Occupied column of row ``i`` with the fewest members (lowest on ties)."""
        off = int(self.context.offsets[i])
        row = self.M[off:off + self.context.P[i]]
        occupied = np.flatnonzero(row > 0)
        if len(occupied) == 0:
            raise ValueError(f"row {i} has no occupied column")
        j = int(occupied[np.argmin(row[occupied])])
        return j, int(row[j])


def empty_state(context: ProblemContext) -> TupleState:
    return TupleState(context)


def rebuild(H: Iterable[int], context: ProblemContext) -> TupleState:
    """Fresh state for ``H`` with ``M``/``F`` computed by histogram, not by 1-moves."""
    state = TupleState(context)
    idx = sorted(context.index_of(int(v)) for v in H)
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate values in tuple")
    state.idx = idx
    state.member[idx] = True
    if idx and context.width:
        state.M[:] = np.bincount(context.cols[idx].ravel(), minlength=context.width)
    if context.width:
        zeros = (state.M == 0).astype(np.int32)
        state.F[:] = np.add.reduceat(zeros, context.offsets)
    state.n_violated = int(np.count_nonzero(state.F == 0))
    return state


def add_value(state: TupleState, v: int) -> TupleState:
    state.add_value(v)
    return state


def remove_value(state: TupleState, v: int) -> TupleState:
    state.remove_value(v)
    return state


def vio_check(state: TupleState, v: int) -> int:
    return state.vio_check(v)


def vio_row(state: TupleState, v: int) -> int:
    return state.vio_row(v)


def is_admissible(state: TupleState) -> bool:
    return state.is_admissible()


def diameter(H: Sequence[int]) -> int:
    if len(H) == 0:
        raise ValueError("diameter of an empty tuple is undefined")
    return int(H[-1]) - int(H[0])


def distance(H_A: Iterable[int], H_B: Iterable[int]) -> int:
    """Number of 1-moves separating two tuples (size of the symmetric difference)."""
    return len(set(H_A) ^ set(H_B))


# -- tuple files --------------------------------------------------------------

def write_tuple_file(path, H: Sequence[int], comment: str | None = None) -> None:
    H = [int(h) for h in H]
    lines = [f"# k={len(H)} diameter={diameter(H) if H else 'none'}"]
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.extend(str(h) for h in H)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_tuple_file(path) -> tuple[int, ...]:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not an integer: {line!r}") from None
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise ValueError(f"{path}: values not strictly increasing ({a}, {b})")
    return tuple(values)
